#include <cmath>

#include "doctest.h"
#include "dissolv/error.hpp"
#include "dissolv/sockets.hpp"
#include "dissolv/synth.hpp"
#include "support.hpp"

using namespace dissolv;
using namespace dissolv::geom;
using dissolv::testing::fixture;

namespace {

const SocketLibrary& lib() {
  static const SocketLibrary l = load_socket_library(default_socket_library_path());
  return l;
}

FootprintInst two_terminal(const char* lib_id, Side side = Side::Top) {
  FootprintInst fp;
  fp.lib_id = lib_id;
  fp.reference = "R1";
  fp.at = {10, 10};
  fp.side = side;
  for (double x : {-0.9125, 0.9125}) {
    PadDef p;
    p.number = x < 0 ? "1" : "2";
    p.at_rel = {x, 0};
    p.size = {1.025, 1.4};
    p.net = 1;
    fp.pads.push_back(p);
  }
  return fp;
}

double union_volume(const std::vector<Solid>& parts, double pitch = 0.025) {
  return volume(unite(parts), pitch).volume;
}

ErrorCode error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_SUITE("sockets") {
  TEST_CASE("bundled library matches common footprints") {
    CHECK(lib().match("Resistor_SMD:R_0805_2012Metric")->package == "R0805");
    CHECK(lib().match("Capacitor_SMD:C_0603_1608Metric")->package == "R0603");
    CHECK(lib().match("Package_SO:SOIC-8_3.9x4.9mm_P1.27mm")->package == "SOIC-8");
    CHECK(lib().match("Package_SO:SOIC-14_3.9x8.7mm_P1.27mm")->package == "SOIC-14");
    CHECK(lib().match("Connector_PinHeader_2.54mm:PinHeader_1x02_P2.54mm_Vertical")->package == "DIP-2.54");
    CHECK(lib().match("Package_QFP:LQFP-48") == nullptr);
    CHECK(lib().find("SOT-23")->kind == SocketKind::LeadedSmd);
  }

  TEST_CASE("longest alias wins regardless of order") {
    const auto l = socket_library_from_json(R"({"packages": {
      "A": {"kind": "tht", "aliases": ["SOIC"], "body": [1, 1, 1]},
      "B": {"kind": "tht", "aliases": ["SOIC-8"], "body": [1, 1, 1]}}})");
    CHECK(l.match("Package_SO:SOIC-8_x")->package == "B");
    CHECK(l.match("Package_SO:SOIC-16_x")->package == "A");
  }

  TEST_CASE("malformed library documents") {
    CHECK(error_of([] { socket_library_from_json("{}"); }) == ErrorCode::ConfigError);
    CHECK(error_of([] {
            socket_library_from_json(R"({"packages": {"X": {"kind": "tht", "body": [1, 1, 1], "colour": 1}}})");
          }) == ErrorCode::ConfigError);
    CHECK(error_of([] { socket_library_from_json(R"({"packages": {"X": {"kind": "weird", "body": [1, 1, 1]}}})"); }) ==
          ErrorCode::ConfigError);
    CHECK(error_of([] { load_socket_library("/nonexistent/sockets.json"); }) == ErrorCode::FileNotFound);
  }

  TEST_CASE("two-terminal pocket is (l + 2 ec) x w x h from the top") {
    const Stackup st = make_stackup(1, ProcessParams{});
    const auto parts = socket_solids(two_terminal("R_0805"), lib(), st, ProcessParams{});
    REQUIRE_FALSE(parts.empty());
    const Aabb b = unite(parts).bounds();
    CHECK(b.max.z == doctest::Approx(st.board_height));
    CHECK(b.min.z == doctest::Approx(st.board_height - 0.5));
    CHECK(b.extent().x == doctest::Approx(2.4));
    CHECK(b.extent().y == doctest::Approx(1.25));
    CHECK(union_volume(parts) == doctest::Approx(2.4 * 1.25 * 0.5).epsilon(0.02));
  }

  TEST_CASE("bottom-side sockets open on the bottom face") {
    const Stackup st = make_stackup(2, ProcessParams{});
    const auto parts = socket_solids(two_terminal("R_0805", Side::Bottom), lib(), st, ProcessParams{});
    const Aabb b = unite(parts).bounds();
    CHECK(b.min.z == doctest::Approx(0.0));
    CHECK(b.max.z == doctest::Approx(0.5));
  }

  TEST_CASE("socket depth never breaks through the bottom insulation") {
    ProcessParams p;
    const Stackup st = make_stackup(1, p);
    FootprintInst fp = two_terminal("Package_SO:SOIC-8");
    fp.pads.clear();
    for (int i = 0; i < 8; ++i) {
      PadDef pad;
      pad.number = std::to_string(i + 1);
      pad.at_rel = {i < 4 ? -2.475 : 2.475, -1.905 + 1.27 * (i % 4)};
      pad.size = {1.95, 0.6};
      fp.pads.push_back(pad);
    }
    const auto parts = socket_solids(fp, lib(), st, p);
    const Aabb b = unite(parts).bounds();
    CHECK(b.min.z >= st.insulation - 1e-12);
    CHECK(b.max.z == doctest::Approx(st.board_height));
    // Shallow body cradle plus one pocket per lead.
    CHECK(parts.size() == 9);
    CHECK(contains(unite(parts), {10, 10, st.board_height - 0.1}));
    CHECK_FALSE(contains(unite(parts), {10, 10, st.board_height - 0.2}));
  }

  TEST_CASE("through-hole pin cavities") {
    const Stackup st = make_stackup(2, ProcessParams{});
    FootprintInst fp = two_terminal("PinHeader_1x02");
    for (auto& pad : fp.pads) {
      pad.kind = PadKind::ThruHole;
      pad.drill = 1.1;
    }
    const auto parts = socket_solids(fp, lib(), st, ProcessParams{});
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].kind() == Solid::Kind::Cylinder);
    CHECK(parts[0].cylinder().radius == doctest::Approx(0.55));
    CHECK(parts[0].bounds().min.z == doctest::Approx(st.insulation));
    CHECK(parts[0].bounds().max.z == doctest::Approx(st.board_height));
  }

  TEST_CASE("unknown package and pin count mismatch") {
    const Stackup st = make_stackup(1, ProcessParams{});
    CHECK(error_of([&] { socket_solids(two_terminal("Package_QFP:LQFP-48"), lib(), st, ProcessParams{}); }) ==
          ErrorCode::UnknownPackage);
    auto fp = two_terminal("R_0805");
    fp.pads.pop_back();
    CHECK(error_of([&] { socket_solids(fp, lib(), st, ProcessParams{}); }) == ErrorCode::PinCountMismatch);
  }
}

TEST_SUITE("synth") {
  TEST_CASE("30 mm trace solid matches the box plus joints oracle") {
    const ProcessParams p;
    const Stackup st = make_stackup(1, p);
    TraceSegment seg{{0, 0}, {30, 0}, 0.7, 0, 1};
    const Solid s = trace_solid(seg, st, p);
    const double exact = 30 * 0.7 * 0.7 + kPi * 0.35 * 0.35 * 0.7;
    const auto v = volume(s, 0.05);
    CHECK(std::abs(v.volume - exact) <= v.error_bound);
    CHECK(v.volume == doctest::Approx(14.97).epsilon(0.02));
    CHECK(s.bounds().min.z == doctest::Approx(st.layers[0].z0));
    CHECK(s.bounds().max.z == doctest::Approx(st.layers[0].z1));
  }

  TEST_CASE("trace volume is invariant under bearing") {
    const ProcessParams p;
    const Stackup st = make_stackup(1, p);
    const double ref = volume(trace_solid({{0, 0}, {10, 0}, 0.8, 0, 1}, st, p), 0.05).volume;
    for (double deg : {17.0, 45.0, 90.0, 133.0}) {
      const Vec2 e = rotate({10, 0}, deg);
      const auto v = volume(trace_solid({{1, 2}, {1 + e.x, 2 + e.y}, 0.8, 0, 1}, st, p), 0.05);
      CHECK(std::abs(v.volume - ref) <= 2 * v.error_bound);
    }
  }

  TEST_CASE("trace layer outside the stackup") {
    const ProcessParams p;
    const Stackup st = make_stackup(1, p);
    CHECK(error_of([&] { trace_solid({{0, 0}, {1, 0}, 0.7, 1, 1}, st, p); }) == ErrorCode::LayerOutOfRange);
  }

  TEST_CASE("vias span their layer range") {
    const Stackup st = make_stackup(3, ProcessParams{});
    const Solid v = via_solid({{5, 5}, 1.2, 0, 2, 1}, st);
    CHECK(v.bounds().min.z == doctest::Approx(st.layers[0].z0));
    CHECK(v.bounds().max.z == doctest::Approx(st.layers[2].z1));
    const Solid inner = via_solid({{5, 5}, 1.2, 1, 2, 1}, st);
    CHECK(inner.bounds().min.z == doctest::Approx(st.layers[1].z0));
    CHECK(error_of([&] { via_solid({{5, 5}, 1.0, 0, 2, 1}, st); }) == ErrorCode::DiameterBelowMinimum);
    CHECK_FALSE(via_solid({{5, 5}, 1.0, 0, 2, 1}, st, 0.0).is_empty());
  }

  TEST_CASE("pad cuboids") {
    const ProcessParams p;
    const Stackup st = make_stackup(2, p);
    FootprintInst fp = two_terminal("R_0805");
    const Solid top = pad_solid(fp.pads[0], fp, st, p);
    CHECK(top.bounds().max.z == doctest::Approx(st.board_height));
    CHECK(top.bounds().min.z == doctest::Approx(st.board_height - st.insulation));
    fp.side = Side::Bottom;
    const Solid bottom = pad_solid(fp.pads[0], fp, st, p);
    CHECK(bottom.bounds().min.z == doctest::Approx(0));
    CHECK(bottom.bounds().max.z == doctest::Approx(st.insulation));

    PadDef tht = fp.pads[0];
    tht.kind = PadKind::ThruHole;
    CHECK(pad_solid(tht, fp, st, p).is_empty());
    PadDef floating = fp.pads[0];
    floating.net.reset();
    CHECK(pad_solid(floating, fp, st, p).is_empty());

    const std::vector<Vec2> far_board{{100, 100}, {110, 100}, {110, 110}, {100, 110}};
    CHECK(error_of([&] { pad_solid(fp.pads[0], fp, st, p, &far_board); }) == ErrorCode::PadOutsideBoard);
  }

  TEST_CASE("demo assembly: every net has an outlet and no net touches another") {
    const PcbDesign d = load_design(fixture("two_layer_demo.kicad_pcb"));
    const Assembly a = assemble(d, ProcessParams{}, lib(), SynthOptions{});
    CHECK(a.warnings.empty());
    CHECK(a.drc_violations == 0);
    REQUIRE(a.channel_set.nets.size() == 3);
    for (const auto& n : a.channel_set.nets) {
      CAPTURE(n.name);
      CHECK(n.outlet_count >= 1);
      REQUIRE(n.volume.has_value());
      CHECK(n.volume->volume > 0);
    }
    const auto& nets = a.channel_set.nets;
    for (std::size_t i = 0; i < nets.size(); ++i)
      for (std::size_t k = i + 1; k < nets.size(); ++k) {
        CAPTURE(nets[i].name);
        CAPTURE(nets[k].name);
        CHECK_FALSE(touches(nets[i].channel, nets[k].channel));
      }
  }

  TEST_CASE("channels stay inside the body and the board is the complement") {
    const PcbDesign d = load_design(fixture("two_layer_demo.kicad_pcb"));
    const Assembly a = assemble(d, ProcessParams{}, lib(), SynthOptions{0.0, false});
    const Aabb body = a.body.bounds();
    const Aabb ch = a.channels.bounds();
    CHECK(ch.min.x > body.min.x);
    CHECK(ch.max.y < body.max.y);
    CHECK(ch.min.z >= body.min.z);
    CHECK(ch.max.z <= body.max.z + 1e-12);
    CHECK(a.board.bounds() == body);

    const double pitch = 0.05;
    const auto vb = volume(a.board, pitch);
    const auto vh = volume(unite({a.channels, a.cavities}), pitch);
    const double exact_body = 30.0 * 20.0 * a.stackup.board_height;
    CHECK(std::abs(vb.volume + vh.volume - exact_body) <= vb.error_bound + vh.error_bound);
  }

  TEST_CASE("floating net produces a warning, not an error") {
    const PcbDesign d = load_design(fixture("no_outlet.kicad_pcb"));
    const Assembly a = assemble(d, ProcessParams{}, lib(), SynthOptions{});
    REQUIRE(a.warnings.size() == 1);
    CHECK(a.warnings[0].code == "NetWithoutOutlet");
    CHECK(a.channel_set.nets.at(0).outlet_count == 0);
  }

  TEST_CASE("rule violations stop synthesis unless forced") {
    const PcbDesign d = load_design(fixture("gap_0p10.kicad_pcb"));
    CHECK(error_of([&] { assemble(d, ProcessParams{}, lib(), SynthOptions{}); }) == ErrorCode::DrcNotClean);
    const Assembly a = assemble(d, ProcessParams{}, lib(), SynthOptions{0.0, true});
    CHECK(a.drc_violations == 1);
  }

  TEST_CASE("through-hole parts and arcs synthesize") {
    const PcbDesign d = load_design(fixture("rounded_tht.kicad_pcb"));
    const Assembly a = assemble(d, ProcessParams{}, lib(), SynthOptions{});
    CHECK(a.warnings.empty());
    for (const auto& n : a.channel_set.nets) CHECK(n.outlet_count >= 1);
  }
}
