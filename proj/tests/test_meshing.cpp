#include <cstdlib>

#include "doctest.h"
#include "dissolv/error.hpp"
#include "dissolv/meshing.hpp"
#include "random_solids.hpp"

using namespace dissolv;
using namespace dissolv::geom;

namespace {

SurfaceMesh mesh_of(const Solid& s, double pitch = 0.1) {
  MeshOptions o;
  o.pitch = pitch;
  return extract_surface(s, o);
}

}  // namespace

TEST_SUITE("meshing") {
  TEST_CASE("case tables are self-consistent") {
    // Every edge used by a triangle list is flagged in the edge mask.
    for (int c = 0; c < 256; ++c) {
      std::uint16_t used = 0;
      for (int i = 0; mc::kTriTable[c][i] != -1; ++i) used |= static_cast<std::uint16_t>(1u << mc::kTriTable[c][i]);
      CHECK(used == mc::kEdgeTable[c]);
    }
    CHECK(mc::kEdgeTable[0] == 0);
    CHECK(mc::kEdgeTable[255] == 0);
  }

  TEST_CASE("box mesh is closed, outward and near the exact volume") {
    const auto sm = mesh_of(box({0.03, 0.01, 1}, {5, 5, 1}));
    CHECK(check_watertight(sm.mesh).ok());
    const double v = mesh_volume(sm.mesh);
    CHECK(v > 0);
    CHECK(std::abs(v - 200.0) <= sm.error_bound);
    const auto b = mesh_bounds(sm.mesh);
    REQUIRE(b.has_value());
    CHECK(b->min.x == doctest::Approx(-4.97).epsilon(0.01));
  }

  TEST_CASE("random trees mesh watertight and agree with the grid volume") {
    dissolv::testing::SolidGen gen(2024);
    for (int t = 0; t < 12; ++t) {
      const Solid s = gen.tree(2);
      const auto sm = mesh_of(s);
      const auto wt = check_watertight(sm.mesh);
      CHECK(wt.ok());
      if (!wt.ok()) continue;
      const auto grid = volume(s, 0.05);
      CHECK(std::abs(mesh_volume(sm.mesh) - grid.volume) <= sm.error_bound + grid.error_bound);
    }
  }

  TEST_CASE("empty solid gives an empty mesh") {
    const auto sm = mesh_of(Solid{});
    CHECK(sm.mesh.triangles.empty());
    CHECK(check_watertight(sm.mesh).ok());
  }

  TEST_CASE("output is deterministic and thread-count independent") {
    dissolv::testing::SolidGen gen(8);
    const Solid s = gen.tree(3);
    const auto a = mesh_of(s);
    setenv("DISSOLVPCB_THREADS", "1", 1);
    const auto b = mesh_of(s);
    setenv("DISSOLVPCB_THREADS", "3", 1);
    const auto c = mesh_of(s);
    unsetenv("DISSOLVPCB_THREADS");
    CHECK(a.mesh == b.mesh);
    CHECK(a.mesh == c.mesh);
  }

  TEST_CASE("pitch guard against the narrowest feature") {
    MeshOptions o;
    o.pitch = 0.2;
    o.min_feature = 0.35;
    CHECK_THROWS_AS(extract_surface(box({0, 0, 0}, {1, 1, 1}), o), Error);
    o.min_feature = 0.7;
    const auto sm = extract_surface(box({0, 0, 0}, {1, 1, 1}), o);
    CHECK(sm.warnings.size() == 1);
    o.pitch = 0.1;
    CHECK(extract_surface(box({0, 0, 0}, {1, 1, 1}), o).warnings.empty());
    o.pitch = -1;
    CHECK_THROWS_AS(extract_surface(box({0, 0, 0}, {1, 1, 1}), o), Error);
  }

  TEST_CASE("watertight check catches holes and flipped faces") {
    auto m = mesh_of(cylinder({0, 0, 0}, 1, 1)).mesh;
    REQUIRE(check_watertight(m).ok());
    auto holed = m;
    holed.triangles.pop_back();
    CHECK(check_watertight(holed).unpaired_edges == 3);
    CHECK_THROWS_AS(mesh_volume(holed), Error);
    auto flipped = m;
    std::swap(flipped.triangles[0][1], flipped.triangles[0][2]);
    CHECK_FALSE(check_watertight(flipped).ok());
    auto degenerate = m;
    degenerate.triangles.push_back({0, 0, 1});
    CHECK(check_watertight(degenerate).degenerate_triangles == 1);
  }

  TEST_CASE("reversing every face negates the volume") {
    auto m = mesh_of(box({0, 0, 0}, {1, 2, 0.5})).mesh;
    const double v = signed_volume(m);
    for (auto& t : m.triangles) std::swap(t[1], t[2]);
    CHECK(signed_volume(m) == doctest::Approx(-v));
  }
}
