#include "dissolv/meshing.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "dissolv/error.hpp"
#include "dissolv/field.hpp"
#include "parallel.hpp"

namespace dissolv {

namespace {

// Interpolated vertices stay this far (in cell fractions) from grid nodes,
// which keeps every triangle non-degenerate.
constexpr double kMinFraction = 1e-3;

// Field values are clamped to +-kBandCells * pitch. Only cells straddling the
// surface are triangulated, so the clamp never moves a vertex by more than
// the interpolation already does.
constexpr double kBandCells = 4.0;

// The case table lists triangles clockwise when viewed from the outside of
// the "inside" corners; emitted triangles swap two vertices.
constexpr bool kReverseTableWinding = true;

struct Grid {
  Vec3 origin;
  double pitch = 0.0;
  std::size_t nx = 0, ny = 0, nz = 0;

  std::size_t node(std::size_t i, std::size_t j, std::size_t k) const { return (k * ny + j) * nx + i; }
};

// Edge index -> (corner offset, axis) in the cell's lower-corner frame.
struct EdgeRef {
  std::uint8_t di, dj, dk, axis;
};
constexpr EdgeRef kEdges[12] = {
    {0, 0, 0, 0}, {1, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {1, 0, 1, 1},
    {0, 1, 1, 0}, {0, 0, 1, 1}, {0, 0, 0, 2}, {1, 0, 0, 2}, {1, 1, 0, 2}, {0, 1, 0, 2},
};
constexpr std::uint8_t kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                        {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

struct SlabOutput {
  std::vector<std::array<std::uint64_t, 3>> tris;  // edge keys
  std::uint64_t surface_cells = 0;
};

}  // namespace

SurfaceMesh extract_surface(const geom::Solid& s, const MeshOptions& options) {
  const double p = options.pitch;
  if (!(p > 0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidSolid, "mesh pitch must be positive");
  SurfaceMesh out;
  out.pitch = p;
  if (options.min_feature) {
    const double f = *options.min_feature;
    if (p > 0.5 * f + 1e-12) {
      throw Error(ErrorCode::PitchTooCoarse, "mesh pitch " + std::to_string(p) + " mm exceeds half the " +
                                                 std::to_string(f) + " mm minimum trace width");
    }
    if (p > 0.25 * f + 1e-12) {
      out.warnings.push_back("mesh pitch " + std::to_string(p) + " mm is above a quarter of the minimum trace width (" +
                             std::to_string(f) + " mm); narrow channels may be distorted");
    }
  }
  if (s.is_empty() || s.bounds().empty()) return out;

  const geom::Aabb b = s.bounds();
  for (double v : {b.min.x, b.min.y, b.min.z, b.max.x, b.max.y, b.max.z})
    if (!std::isfinite(v) || std::fabs(v) > 1e12) throw Error(ErrorCode::UnboundedSolid, "solid is unbounded");

  Grid g;
  g.pitch = p;
  g.origin = b.min - Vec3{2 * p, 2 * p, 2 * p};
  const Vec3 ext = b.extent();
  const double fx = std::ceil(ext.x / p) + 5, fy = std::ceil(ext.y / p) + 5, fz = std::ceil(ext.z / p) + 5;
  if (fx * fy * fz > 1.5e9) throw Error(ErrorCode::UnboundedSolid, "mesh grid too large for pitch");
  g.nx = static_cast<std::size_t>(fx);
  g.ny = static_cast<std::size_t>(fy);
  g.nz = static_cast<std::size_t>(fz);

  std::vector<double> xs(g.nx);
  for (std::size_t i = 0; i < g.nx; ++i) xs[i] = g.origin.x + static_cast<double>(i) * p;

  const geom::FieldProgram prog(s);
  const double band = kBandCells * p;
  std::vector<double> field(g.nx * g.ny * g.nz);
  detail::parallel_for(g.nz, [&](std::size_t k) {
    thread_local geom::FieldProgram::Scratch scratch;
    const double z = g.origin.z + static_cast<double>(k) * p;
    for (std::size_t j = 0; j < g.ny; ++j) {
      const double y = g.origin.y + static_cast<double>(j) * p;
      prog.sdf_row(xs.data(), g.nx, y, z, band, field.data() + g.node(0, j, k), scratch);
    }
  });

  std::vector<SlabOutput> slabs(g.nz - 1);
  detail::parallel_for(g.nz - 1, [&](std::size_t k) {
    SlabOutput& so = slabs[k];
    for (std::size_t j = 0; j + 1 < g.ny; ++j) {
      for (std::size_t i = 0; i + 1 < g.nx; ++i) {
        unsigned cube = 0;
        for (unsigned c = 0; c < 8; ++c) {
          if (field[g.node(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2])] < 0.0) cube |= 1u << c;
        }
        if (mc::kEdgeTable[cube] == 0) continue;
        ++so.surface_cells;
        std::uint64_t keys[12];
        for (unsigned e = 0; e < 12; ++e) {
          if (!(mc::kEdgeTable[cube] & (1u << e))) continue;
          const EdgeRef& r = kEdges[e];
          keys[e] = static_cast<std::uint64_t>(g.node(i + r.di, j + r.dj, k + r.dk)) * 3 + r.axis;
        }
        const std::int8_t* row = mc::kTriTable[cube];
        for (int t = 0; row[t] != -1; t += 3) {
          if (kReverseTableWinding)
            so.tris.push_back({keys[row[t]], keys[row[t + 2]], keys[row[t + 1]]});
          else
            so.tris.push_back({keys[row[t]], keys[row[t + 1]], keys[row[t + 2]]});
        }
      }
    }
  });

  // Vertices are numbered by first use, walking slabs in order.
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  auto vertex_of = [&](std::uint64_t key) -> std::uint32_t {
    auto [it, inserted] = index.try_emplace(key, static_cast<std::uint32_t>(out.mesh.vertices.size()));
    if (inserted) {
      const std::size_t node = static_cast<std::size_t>(key / 3);
      const unsigned axis = static_cast<unsigned>(key % 3);
      const std::size_t i = node % g.nx, j = (node / g.nx) % g.ny, k = node / (g.nx * g.ny);
      const std::size_t step = axis == 0 ? 1 : axis == 1 ? g.nx : g.nx * g.ny;
      const double a = field[node], c = field[node + step];
      const double t = std::clamp(a / (a - c), kMinFraction, 1.0 - kMinFraction);
      Vec3 v{g.origin.x + static_cast<double>(i) * p, g.origin.y + static_cast<double>(j) * p,
             g.origin.z + static_cast<double>(k) * p};
      (axis == 0 ? v.x : axis == 1 ? v.y : v.z) += t * p;
      out.mesh.vertices.push_back(v);
    }
    return it->second;
  };
  std::size_t total = 0;
  for (const auto& so : slabs) total += so.tris.size();
  out.mesh.triangles.reserve(total);
  index.reserve(total / 2 + 16);
  for (const auto& so : slabs) {
    out.surface_cells += so.surface_cells;
    for (const auto& t : so.tris) out.mesh.triangles.push_back({vertex_of(t[0]), vertex_of(t[1]), vertex_of(t[2])});
  }
  out.error_bound = static_cast<double>(out.surface_cells) * p * p * p;
  return out;
}

WatertightReport check_watertight(const TriangleMesh& m) {
  WatertightReport r;
  std::vector<std::uint64_t> edges;
  edges.reserve(m.triangles.size() * 3);
  for (const auto& t : m.triangles) {
    for (int e = 0; e < 3; ++e) {
      const std::uint64_t a = t[e], b = t[(e + 1) % 3];
      edges.push_back(a << 32 | b);
    }
    const Vec3 n = cross(m.vertices[t[1]] - m.vertices[t[0]], m.vertices[t[2]] - m.vertices[t[0]]);
    if (0.5 * norm(n) <= 1e-12) ++r.degenerate_triangles;
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i + 1 < edges.size() && edges[i + 1] == edges[i]) ++r.duplicated_edges;
    const std::uint64_t rev = (edges[i] & 0xffffffffu) << 32 | edges[i] >> 32;
    if (!std::binary_search(edges.begin(), edges.end(), rev)) ++r.unpaired_edges;
  }
  return r;
}

double signed_volume(const TriangleMesh& m) {
  double v = 0.0;
  for (const auto& t : m.triangles)
    v += dot(m.vertices[t[0]], cross(m.vertices[t[1]], m.vertices[t[2]]));
  return v / 6.0;
}

double mesh_volume(const TriangleMesh& m) {
  const WatertightReport r = check_watertight(m);
  if (!r.ok()) {
    throw Error(ErrorCode::NotWatertight, std::to_string(r.unpaired_edges) + " unpaired and " +
                                              std::to_string(r.duplicated_edges) + " duplicated directed edges, " +
                                              std::to_string(r.degenerate_triangles) + " degenerate triangles");
  }
  return signed_volume(m);
}

std::optional<MeshBounds> mesh_bounds(const TriangleMesh& m) {
  if (m.vertices.empty()) return std::nullopt;
  MeshBounds b{m.vertices.front(), m.vertices.front()};
  for (const Vec3& v : m.vertices) {
    b.min = {std::min(b.min.x, v.x), std::min(b.min.y, v.y), std::min(b.min.z, v.z)};
    b.max = {std::max(b.max.x, v.x), std::max(b.max.y, v.y), std::max(b.max.z, v.z)};
  }
  return b;
}

}  // namespace dissolv
