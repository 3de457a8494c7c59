#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dissolv/geom.hpp"
#include "dissolv/vec.hpp"

namespace dissolv {

namespace mc {
extern const std::uint16_t kEdgeTable[256];
extern const std::int8_t kTriTable[256][16];
}  // namespace mc

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;  // counter-clockwise seen from outside

  friend bool operator==(const TriangleMesh&, const TriangleMesh&) = default;
};

struct MeshOptions {
  double pitch = 0.1;  // mm
  /// Narrowest channel that must survive meshing. Pitches above half of it
  /// throw PitchTooCoarse; above a quarter they only warn.
  std::optional<double> min_feature;
};

struct SurfaceMesh {
  TriangleMesh mesh;
  double pitch = 0.0;
  std::uint64_t surface_cells = 0;
  double error_bound = 0.0;  // surface_cells * pitch^3
  std::vector<std::string> warnings;
};

/// Marching cubes over the clamped signed-distance field on the solid's
/// bounding box padded by two cells. Output is independent of thread count
/// and SIMD variant.
SurfaceMesh extract_surface(const geom::Solid& s, const MeshOptions& options);

struct WatertightReport {
  std::size_t unpaired_edges = 0;    // directed edges whose reverse is missing
  std::size_t duplicated_edges = 0;  // directed edges used more than once
  std::size_t degenerate_triangles = 0;

  bool ok() const { return unpaired_edges == 0 && duplicated_edges == 0 && degenerate_triangles == 0; }
};

WatertightReport check_watertight(const TriangleMesh& m);

/// Divergence-theorem volume. Throws NotWatertight for open or
/// inconsistently wound meshes.
double mesh_volume(const TriangleMesh& m);

/// Volume without the watertightness check.
double signed_volume(const TriangleMesh& m);

struct MeshBounds {
  Vec3 min;
  Vec3 max;
};
std::optional<MeshBounds> mesh_bounds(const TriangleMesh& m);

}  // namespace dissolv
