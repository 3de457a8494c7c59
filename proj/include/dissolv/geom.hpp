#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "dissolv/simd/kernels.hpp"
#include "dissolv/vec.hpp"

namespace dissolv::geom {

/// Box with axis-aligned Z, rotated by yaw (degrees, counter-clockwise)
/// about its centre.
struct BoxZ {
  Vec3 center;
  Vec3 half_extents;
  double yaw_deg = 0.0;
  friend bool operator==(const BoxZ&, const BoxZ&) = default;
};

struct CylinderZ {
  Vec3 base_center;
  double radius = 0.0;
  double height = 0.0;
  friend bool operator==(const CylinderZ&, const CylinderZ&) = default;
};

/// Simple counter-clockwise polygon extruded between z0 and z1.
struct ExtrudedPolygon {
  std::vector<Vec2> polygon;
  double z0 = 0.0;
  double z1 = 0.0;
  friend bool operator==(const ExtrudedPolygon&, const ExtrudedPolygon&) = default;
};

struct Aabb {
  Vec3 min{1e300, 1e300, 1e300};
  Vec3 max{-1e300, -1e300, -1e300};

  bool empty() const { return min.x > max.x || min.y > max.y || min.z > max.z; }
  void expand(const Aabb& o);
  Aabb inflated(double r) const;
  Aabb intersection(const Aabb& o) const;
  bool contains(Vec3 p) const;
  Vec3 extent() const { return max - min; }
  friend bool operator==(const Aabb&, const Aabb&) = default;
};

/// Immutable CSG tree. Copies share structure.
class Solid {
 public:
  enum class Kind { Empty, Box, Cylinder, Extrusion, Union, Difference, Intersection };

  Solid();  // the empty solid

  Kind kind() const;
  bool is_empty() const { return kind() == Kind::Empty; }
  bool is_primitive() const;

  const BoxZ& box() const;
  const CylinderZ& cylinder() const;
  const ExtrudedPolygon& extrusion() const;
  /// Precomputed edge table for the extrusion kernel; valid while this
  /// Solid (or a copy) is alive.
  simd::PolygonParams polygon_params() const;

  /// Union/Intersection operands, or for a Difference the base followed by
  /// the subtrahends.
  std::span<const Solid> operands() const;
  const Solid& base() const;                 // Difference only
  std::span<const Solid> subtrahends() const;  // Difference only

  /// Conservative bound, cached at construction. A Difference uses its base.
  const Aabb& bounds() const;

  std::size_t primitive_count() const;
  std::size_t depth() const;

  friend bool operator==(const Solid& a, const Solid& b);

 private:
  struct Node;
  explicit Solid(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> node_;

  friend Solid box(Vec3, Vec3, double);
  friend Solid cylinder(Vec3, double, double);
  friend Solid extrusion(std::vector<Vec2>, double, double);
  friend Solid unite(std::vector<Solid>);
  friend Solid subtract(Solid, std::vector<Solid>);
  friend Solid intersect(std::vector<Solid>);
};

/// Primitive constructors; non-positive dimensions throw InvalidSolid.
Solid box(Vec3 center, Vec3 half_extents, double yaw_deg = 0.0);
Solid cylinder(Vec3 base_center, double radius, double height);
/// Clockwise input is reversed; self-intersecting input throws.
Solid extrusion(std::vector<Vec2> polygon, double z0, double z1);

/// Empty operands are dropped; a single remaining operand is returned as is.
Solid unite(std::vector<Solid> children);
Solid subtract(Solid base, std::vector<Solid> subtrahends);
Solid intersect(std::vector<Solid> children);

/// Exact closed-set membership.
bool contains(const Solid& s, Vec3 p);

/// Signed distance bound: exact for primitives, min/max for booleans.
double sdf(const Solid& s, Vec3 p);

Aabb bbox(const Solid& s);

struct VolumeEstimate {
  double volume = 0.0;       // mm^3
  double error_bound = 0.0;  // mm^3
  std::uint64_t inside_cells = 0;
  std::uint64_t boundary_cells = 0;
  double pitch = 0.0;
};

/// Cell-centre occupancy integration on a uniform grid. The error bound
/// counts every cell whose membership differs from a face neighbour.
VolumeEstimate volume(const Solid& s, double pitch);

/// True when two unions of boxes/cylinders share at least one point
/// (closed sets, 1e-9 mm slack). Used for outlet detection.
bool touches(const Solid& a, const Solid& b);

/// Kernel parameter blocks; shared by pointwise and batched evaluation so
/// both see identical constants.
simd::BoxParams kernel_params(const BoxZ& b);
simd::CylinderParams kernel_params(const CylinderZ& c);

}  // namespace dissolv::geom
