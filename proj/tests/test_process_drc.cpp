#include <algorithm>
#include <random>

#include "doctest.h"
#include "dissolv/drc.hpp"
#include "dissolv/error.hpp"
#include "dissolv/process.hpp"
#include "support.hpp"

using namespace dissolv;
using dissolv::testing::board;
using dissolv::testing::segment;
using dissolv::testing::via;

TEST_SUITE("process") {
  TEST_CASE("board height") {
    CHECK(board_height(2, 0.3, 0.7) == doctest::Approx(2.3).epsilon(1e-12));
    CHECK(board_height(1, 0.18, 0.7) == doctest::Approx(1.06).epsilon(1e-12));
    CHECK(board_height(2, 0.18, 0.7) == doctest::Approx(1.94).epsilon(1e-12));
    CHECK_THROWS_AS(board_height(0, 0.3, 0.7), Error);
    CHECK_THROWS_AS(board_height(1, 0.17, 0.7), Error);
    CHECK_THROWS_AS(board_height(1, 0.3, 0.6), Error);
  }

  TEST_CASE("board height grows monotonically with every input") {
    for (int l = 1; l < 6; ++l)
      for (double t = 0.18; t < 1.0; t += 0.11) {
        CHECK(board_height(l + 1, t, 0.7) > board_height(l, t, 0.7));
        CHECK(board_height(l, t + 0.01, 0.7) > board_height(l, t, 0.7));
        CHECK(board_height(l, t, 0.8) > board_height(l, t, 0.7));
      }
  }

  TEST_CASE("stackup layers are disjoint and ordered bottom-up") {
    const Stackup s = make_stackup(3, ProcessParams{});
    REQUIRE(s.layers.size() == 3);
    CHECK(s.layers[0].z0 == doctest::Approx(0.3));
    for (std::size_t i = 0; i < 3; ++i) CHECK(s.layers[i].extent() == doctest::Approx(0.7));
    for (std::size_t i = 0; i + 1 < 3; ++i) CHECK(s.layers[i + 1].z0 - s.layers[i].z1 == doctest::Approx(0.3));
    CHECK(s.board_height - s.layers.back().z1 == doctest::Approx(0.3));
  }

  TEST_CASE("defaults are valid and floors are enforced") {
    ProcessParams p;
    CHECK(validate_params(p).empty());
    CHECK(p.pad_pitch_min() == doctest::Approx(0.85));
    p.wall_xy_min = 0.1;
    p.via_diameter = 1.0;
    const auto v = validate_params(p);
    CHECK(v.size() == 2);
    ProcessParams wide;
    wide.nozzle = Nozzle::Mm04;
    CHECK(validate_params(wide).size() >= 1);  // 0.7 mm traces are below the 0.4 mm nozzle floor
  }

  TEST_CASE("config JSON overrides and rejects unknown keys") {
    const auto p = params_from_json(R"({"insulation_z": 0.18, "nozzle": 0.4, "trace_width_min": 0.9, "trace_height": 0.9})");
    CHECK(p.insulation_z == 0.18);
    CHECK(p.nozzle == Nozzle::Mm04);
    CHECK(validate_params(p).empty());
    CHECK_THROWS_AS(params_from_json(R"({"bogus": 1})"), Error);
    CHECK_THROWS_AS(params_from_json(R"({"nozzle": 0.3})"), Error);
    CHECK_THROWS_AS(params_from_json("[1]"), Error);
    CHECK_THROWS_AS(params_from_json(R"({"pad_pitch_min": 2.0})"), Error);
    const auto round = params_from_json(params_to_json(p));
    CHECK(round.insulation_z == p.insulation_z);
    CHECK(round.trace_width_min == p.trace_width_min);
  }
}

TEST_SUITE("drc") {
  TEST_CASE("segment distance oracle") {
    CHECK(segment_distance({0, 0}, {10, 0}, {0, 1}, {10, 1}) == doctest::Approx(1));
    CHECK(segment_distance({0, 0}, {10, 0}, {5, -1}, {5, 1}) == 0.0);
    CHECK(segment_distance({0, 0}, {1, 0}, {4, 4}, {4, 4}) == doctest::Approx(5));
    CHECK(point_segment_distance({5, 3}, {0, 0}, {10, 0}) == doctest::Approx(3));
  }

  TEST_CASE("segment distance is symmetric") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 500; ++i) {
      const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)}, d{u(rng), u(rng)};
      const double ab = segment_distance(a, b, c, d);
      CHECK(ab == doctest::Approx(segment_distance(c, d, a, b)).epsilon(1e-12));
      CHECK(ab == doctest::Approx(segment_distance(b, a, d, c)).epsilon(1e-12));
      const auto cp = closest_points(a, b, c, d);
      CHECK(distance(cp.on_a, cp.on_b) == doctest::Approx(ab).epsilon(1e-9));
    }
  }

  TEST_CASE("clearance boundary: 0.15 passes, 0.149 fails") {
    const ProcessParams p;
    const auto ok = board(segment(105, 110, 130, 110, 0.7, 1) + segment(105, 110.85, 130, 110.85, 0.7, 2));
    CHECK(run_drc(ok, p).empty());
    const auto bad = board(segment(105, 110, 130, 110, 0.7, 1) + segment(105, 110.849, 130, 110.849, 0.7, 2));
    const auto v = run_drc(bad, p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == DrcRule::TraceClearance);
    CHECK(v[0].measured == doctest::Approx(0.149));
    CHECK(v[0].limit == doctest::Approx(0.15));
  }

  TEST_CASE("same-net overlap is not a clearance violation") {
    const auto d = board(segment(105, 110, 130, 110, 0.7, 1) + segment(105, 110.5, 130, 110.5, 0.7, 1));
    CHECK(run_drc(d, ProcessParams{}).empty());
  }

  TEST_CASE("width boundary: 0.7 passes, 0.699 fails") {
    const ProcessParams p;
    CHECK(run_drc(board(segment(105, 110, 130, 110, 0.7, 1)), p).empty());
    const auto v = run_drc(board(segment(105, 110, 130, 110, 0.699, 1)), p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == DrcRule::TraceWidth);
  }

  TEST_CASE("via boundary: 1.2 passes, 1.19 fails") {
    const ProcessParams p;
    CHECK(run_drc(board(via(120, 110, 1.2, 1)), p).empty());
    const auto v = run_drc(board(via(120, 110, 1.19, 1)), p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == DrcRule::ViaDiameter);
  }

  TEST_CASE("edge clearance") {
    const ProcessParams p;
    // Half width 0.35 plus 0.15 wall: centre line 0.5 from the edge is the limit.
    CHECK(run_drc(board(segment(105, 100.5, 130, 100.5, 0.7, 1)), p).empty());
    const auto v = run_drc(board(segment(105, 100.45, 130, 100.45, 0.7, 1)), p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == DrcRule::EdgeClearance);
  }

  TEST_CASE("report is independent of input order") {
    std::string a = segment(105, 110, 130, 110, 0.69, 1) + segment(105, 110.8, 130, 110.8, 0.7, 2) +
                    via(120, 115, 1.0, 1) + segment(105, 119.8, 130, 119.8, 0.7, 2);
    std::string b = segment(105, 119.8, 130, 119.8, 0.7, 2) + via(120, 115, 1.0, 1) +
                    segment(105, 110.8, 130, 110.8, 0.7, 2) + segment(105, 110, 130, 110, 0.69, 1);
    const ProcessParams p;
    const auto va = run_drc(board(a), p);
    const auto vb = run_drc(board(b), p);
    CHECK(va.size() >= 4);
    CHECK(drc_report_json(va, p) == drc_report_json(vb, p));
    for (const auto& v : va) CHECK(v.measured < v.limit);
  }

  TEST_CASE("demo fixture is clean") {
    CHECK(run_drc(load_design(dissolv::testing::fixture("two_layer_demo.kicad_pcb")), ProcessParams{}).empty());
    CHECK(run_drc(load_design(dissolv::testing::fixture("rounded_tht.kicad_pcb")), ProcessParams{}).empty());
    CHECK(run_drc(load_design(dissolv::testing::fixture("gap_0p10.kicad_pcb")), ProcessParams{}).size() == 1);
  }
}
