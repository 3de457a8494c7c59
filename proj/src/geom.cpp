#include "dissolv/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dissolv/error.hpp"
#include "dissolv/field.hpp"
#include "parallel.hpp"

namespace dissolv::geom {

namespace {

struct PolygonTable {
  std::vector<double> ax, ay, by, ex, ey, inv_len2, slope;
};

// cos/sin of a yaw in degrees, exact at multiples of 90.
std::pair<double, double> cos_sin(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0) r += 360.0;
  if (r == 0.0) return {1.0, 0.0};
  if (r == 90.0) return {0.0, 1.0};
  if (r == 180.0) return {-1.0, 0.0};
  if (r == 270.0) return {0.0, -1.0};
  const double a = r * kPi / 180.0;
  return {std::cos(a), std::sin(a)};
}

bool finite(Vec3 v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

double polygon_area2(const std::vector<Vec2>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) a += cross(p[i], p[(i + 1) % p.size()]);
  return a;
}

int orient(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0) - (v < 0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool is_simple(const std::vector<Vec2>& p) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return false;
    }
  }
  return true;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSolid, what); }

}  // namespace

struct Solid::Node {
  Kind kind = Kind::Empty;
  BoxZ box;
  CylinderZ cyl;
  ExtrudedPolygon poly;
  PolygonTable table;
  std::vector<Solid> operands;
  Aabb bounds;
  std::size_t primitives = 0;
  std::size_t depth = 1;
};

// ---------------------------------------------------------------- Aabb

void Aabb::expand(const Aabb& o) {
  min = {std::min(min.x, o.min.x), std::min(min.y, o.min.y), std::min(min.z, o.min.z)};
  max = {std::max(max.x, o.max.x), std::max(max.y, o.max.y), std::max(max.z, o.max.z)};
}

Aabb Aabb::inflated(double r) const {
  if (empty()) return *this;
  return {min - Vec3{r, r, r}, max + Vec3{r, r, r}};
}

Aabb Aabb::intersection(const Aabb& o) const {
  return {{std::max(min.x, o.min.x), std::max(min.y, o.min.y), std::max(min.z, o.min.z)},
          {std::min(max.x, o.max.x), std::min(max.y, o.max.y), std::min(max.z, o.max.z)}};
}

bool Aabb::contains(Vec3 p) const {
  return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z && p.z <= max.z;
}

// ---------------------------------------------------------------- Solid

Solid::Solid() = default;
Solid::Solid(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

Solid::Kind Solid::kind() const { return node_ ? node_->kind : Kind::Empty; }

bool Solid::is_primitive() const {
  const Kind k = kind();
  return k == Kind::Box || k == Kind::Cylinder || k == Kind::Extrusion;
}

const BoxZ& Solid::box() const {
  if (kind() != Kind::Box) invalid("solid is not a box");
  return node_->box;
}

const CylinderZ& Solid::cylinder() const {
  if (kind() != Kind::Cylinder) invalid("solid is not a cylinder");
  return node_->cyl;
}

const ExtrudedPolygon& Solid::extrusion() const {
  if (kind() != Kind::Extrusion) invalid("solid is not an extrusion");
  return node_->poly;
}

simd::PolygonParams Solid::polygon_params() const {
  const ExtrudedPolygon& e = extrusion();
  const PolygonTable& t = node_->table;
  return {t.ax.data(),       t.ay.data(),    t.by.data(),        t.ex.data(),
          t.ey.data(),       t.inv_len2.data(), t.slope.data(),  t.ax.size(),
          0.5 * (e.z0 + e.z1), 0.5 * (e.z1 - e.z0)};
}

std::span<const Solid> Solid::operands() const {
  if (!node_) return {};
  return node_->operands;
}

const Solid& Solid::base() const {
  if (kind() != Kind::Difference) invalid("solid is not a difference");
  return node_->operands.front();
}

std::span<const Solid> Solid::subtrahends() const {
  if (kind() != Kind::Difference) invalid("solid is not a difference");
  return std::span<const Solid>(node_->operands).subspan(1);
}

const Aabb& Solid::bounds() const {
  static const Aabb none{};
  return node_ ? node_->bounds : none;
}

std::size_t Solid::primitive_count() const { return node_ ? node_->primitives : 0; }
std::size_t Solid::depth() const { return node_ ? node_->depth : 1; }

bool operator==(const Solid& a, const Solid& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Solid::Kind::Empty:
      return true;
    case Solid::Kind::Box:
      return a.node_->box == b.node_->box;
    case Solid::Kind::Cylinder:
      return a.node_->cyl == b.node_->cyl;
    case Solid::Kind::Extrusion:
      return a.node_->poly == b.node_->poly;
    default:
      return a.node_->operands == b.node_->operands;
  }
}

// ---------------------------------------------------------------- factories

Solid box(Vec3 center, Vec3 half_extents, double yaw_deg) {
  if (!finite(center) || !std::isfinite(yaw_deg)) invalid("box has non-finite parameters");
  if (!(half_extents.x > 0 && half_extents.y > 0 && half_extents.z > 0) || !finite(half_extents))
    invalid("box half extents must be positive");
  auto n = std::make_shared<Solid::Node>();
  n->kind = Solid::Kind::Box;
  n->box = {center, half_extents, yaw_deg};
  const auto [c, s] = cos_sin(yaw_deg);
  const double ex = std::fabs(c) * half_extents.x + std::fabs(s) * half_extents.y;
  const double ey = std::fabs(s) * half_extents.x + std::fabs(c) * half_extents.y;
  n->bounds = {center - Vec3{ex, ey, half_extents.z}, center + Vec3{ex, ey, half_extents.z}};
  n->primitives = 1;
  return Solid(std::move(n));
}

Solid cylinder(Vec3 base_center, double radius, double height) {
  if (!finite(base_center)) invalid("cylinder has non-finite centre");
  if (!(radius > 0 && height > 0) || !std::isfinite(radius) || !std::isfinite(height))
    invalid("cylinder radius and height must be positive");
  auto n = std::make_shared<Solid::Node>();
  n->kind = Solid::Kind::Cylinder;
  n->cyl = {base_center, radius, height};
  n->bounds = {base_center - Vec3{radius, radius, 0.0}, base_center + Vec3{radius, radius, height}};
  n->primitives = 1;
  return Solid(std::move(n));
}

Solid extrusion(std::vector<Vec2> polygon, double z0, double z1) {
  if (polygon.size() >= 2 && polygon.front() == polygon.back()) polygon.pop_back();
  if (polygon.size() < 3) invalid("extruded polygon needs at least 3 vertices");
  if (!(z1 > z0) || !std::isfinite(z0) || !std::isfinite(z1)) invalid("extrusion needs z1 > z0");
  for (const Vec2& p : polygon)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) invalid("polygon has non-finite vertices");
  const double area2 = polygon_area2(polygon);
  if (area2 == 0.0) invalid("polygon has zero area");
  if (area2 < 0) std::reverse(polygon.begin(), polygon.end());
  if (!is_simple(polygon)) invalid("polygon is self-intersecting");

  auto n = std::make_shared<Solid::Node>();
  n->kind = Solid::Kind::Extrusion;
  PolygonTable& t = n->table;
  Aabb b;
  const std::size_t m = polygon.size();
  for (std::size_t k = 0; k < m; ++k) {
    const Vec2 a = polygon[k], c = polygon[(k + 1) % m];
    const Vec2 e = c - a;
    const double len2 = dot(e, e);
    t.ax.push_back(a.x);
    t.ay.push_back(a.y);
    t.by.push_back(c.y);
    t.ex.push_back(e.x);
    t.ey.push_back(e.y);
    t.inv_len2.push_back(len2 > 0 ? 1.0 / len2 : 0.0);
    t.slope.push_back(e.y != 0 ? e.x / e.y : 0.0);
    b.expand({{a.x, a.y, z0}, {a.x, a.y, z1}});
  }
  n->poly = {std::move(polygon), z0, z1};
  n->bounds = b;
  n->primitives = 1;
  return Solid(std::move(n));
}

Solid unite(std::vector<Solid> children) {
  std::erase_if(children, [](const Solid& s) { return s.is_empty(); });
  if (children.empty()) return Solid();
  if (children.size() == 1) return children.front();
  auto n = std::make_shared<Solid::Node>();
  n->kind = Solid::Kind::Union;
  for (const Solid& c : children) {
    n->bounds.expand(c.bounds());
    n->primitives += c.primitive_count();
    n->depth = std::max(n->depth, c.depth() + 1);
  }
  n->operands = std::move(children);
  return Solid(std::move(n));
}

Solid subtract(Solid base, std::vector<Solid> subtrahends) {
  if (base.is_empty()) return Solid();
  std::erase_if(subtrahends, [](const Solid& s) { return s.is_empty(); });
  if (subtrahends.empty()) return base;
  auto n = std::make_shared<Solid::Node>();
  n->kind = Solid::Kind::Difference;
  n->bounds = base.bounds();
  n->operands.reserve(subtrahends.size() + 1);
  n->operands.push_back(std::move(base));
  for (Solid& s : subtrahends) n->operands.push_back(std::move(s));
  for (const Solid& c : n->operands) {
    n->primitives += c.primitive_count();
    n->depth = std::max(n->depth, c.depth() + 1);
  }
  return Solid(std::move(n));
}

Solid intersect(std::vector<Solid> children) {
  for (const Solid& c : children)
    if (c.is_empty()) return Solid();
  if (children.empty()) return Solid();
  if (children.size() == 1) return children.front();
  auto n = std::make_shared<Solid::Node>();
  n->kind = Solid::Kind::Intersection;
  n->bounds = children.front().bounds();
  for (const Solid& c : children) {
    n->bounds = n->bounds.intersection(c.bounds());
    n->primitives += c.primitive_count();
    n->depth = std::max(n->depth, c.depth() + 1);
  }
  n->operands = std::move(children);
  return Solid(std::move(n));
}

// ---------------------------------------------------------------- evaluation

simd::BoxParams kernel_params(const BoxZ& b) {
  const auto [c, s] = cos_sin(b.yaw_deg);
  return {b.center.x, b.center.y, b.center.z, b.half_extents.x, b.half_extents.y, b.half_extents.z, c, s};
}

simd::CylinderParams kernel_params(const CylinderZ& c) {
  const double hh = 0.5 * c.height;
  return {c.base_center.x, c.base_center.y, c.base_center.z + hh, hh, c.radius};
}

namespace {

double primitive_sdf(const Solid& s, Vec3 p) {
  const simd::Kernels& k = simd::scalar_kernels();
  double out = 0.0;
  switch (s.kind()) {
    case Solid::Kind::Box:
      k.box_sdf(kernel_params(s.box()), &p.x, &p.y, &p.z, &out, 1);
      break;
    case Solid::Kind::Cylinder:
      k.cylinder_sdf(kernel_params(s.cylinder()), &p.x, &p.y, &p.z, &out, 1);
      break;
    default:
      k.polygon_sdf(s.polygon_params(), &p.x, &p.y, &p.z, &out, 1);
      break;
  }
  return out;
}

}  // namespace

bool contains(const Solid& s, Vec3 p) {
  switch (s.kind()) {
    case Solid::Kind::Empty:
      return false;
    case Solid::Kind::Box:
    case Solid::Kind::Cylinder:
    case Solid::Kind::Extrusion:
      return primitive_sdf(s, p) <= 0.0;
    case Solid::Kind::Union:
      for (const Solid& c : s.operands())
        if (contains(c, p)) return true;
      return false;
    case Solid::Kind::Intersection:
      for (const Solid& c : s.operands())
        if (!contains(c, p)) return false;
      return true;
    case Solid::Kind::Difference:
      if (!contains(s.base(), p)) return false;
      for (const Solid& c : s.subtrahends())
        if (contains(c, p)) return false;
      return true;
  }
  return false;
}

double sdf(const Solid& s, Vec3 p) {
  switch (s.kind()) {
    case Solid::Kind::Empty:
      return std::numeric_limits<double>::infinity();
    case Solid::Kind::Box:
    case Solid::Kind::Cylinder:
    case Solid::Kind::Extrusion:
      return primitive_sdf(s, p);
    case Solid::Kind::Union: {
      double v = std::numeric_limits<double>::infinity();
      for (const Solid& c : s.operands()) v = std::min(v, sdf(c, p));
      return v;
    }
    case Solid::Kind::Intersection: {
      double v = -std::numeric_limits<double>::infinity();
      for (const Solid& c : s.operands()) v = std::max(v, sdf(c, p));
      return v;
    }
    case Solid::Kind::Difference: {
      double v = sdf(s.base(), p);
      for (const Solid& c : s.subtrahends()) v = std::max(v, -sdf(c, p));
      return v;
    }
  }
  return 0.0;
}

Aabb bbox(const Solid& s) { return s.bounds(); }

// ---------------------------------------------------------------- volume

VolumeEstimate volume(const Solid& s, double pitch) {
  if (!(pitch > 0) || !std::isfinite(pitch)) throw Error(ErrorCode::InvalidSolid, "volume pitch must be positive");
  VolumeEstimate est;
  est.pitch = pitch;
  if (s.is_empty()) return est;
  const Aabb b = s.bounds();
  if (b.empty()) return est;
  if (!finite(b.min) || !finite(b.max) || std::fabs(b.min.x) > 1e12 || std::fabs(b.max.x) > 1e12)
    throw Error(ErrorCode::UnboundedSolid, "solid has no finite bounding box");

  // One empty cell of padding on every side so boundary detection never
  // needs to look outside the grid.
  const Vec3 origin = b.min - Vec3{pitch, pitch, pitch};
  const Vec3 ext = b.extent();
  const double fx = std::ceil(ext.x / pitch) + 2, fy = std::ceil(ext.y / pitch) + 2, fz = std::ceil(ext.z / pitch) + 2;
  if (fx * fy * fz > 2e9) throw Error(ErrorCode::UnboundedSolid, "volume grid too large for pitch");
  const std::size_t nx = static_cast<std::size_t>(fx), ny = static_cast<std::size_t>(fy),
                    nz = static_cast<std::size_t>(fz);

  std::vector<double> xs(nx);
  for (std::size_t i = 0; i < nx; ++i) xs[i] = origin.x + (static_cast<double>(i) + 0.5) * pitch;

  const FieldProgram prog(s);
  std::vector<std::uint8_t> occ(nx * ny * nz, 0);
  detail::parallel_for(nz, [&](std::size_t k) {
    thread_local FieldProgram::Scratch scratch;
    const double z = origin.z + (static_cast<double>(k) + 0.5) * pitch;
    for (std::size_t j = 0; j < ny; ++j) {
      const double y = origin.y + (static_cast<double>(j) + 0.5) * pitch;
      prog.contains_row(xs.data(), nx, y, z, occ.data() + (k * ny + j) * nx, scratch);
    }
  });

  std::vector<std::uint64_t> inside(nz, 0), boundary(nz, 0);
  detail::parallel_for(nz, [&](std::size_t k) {
    const std::size_t sy = nx, sz = nx * ny;
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t idx = k * sz + j * sy + i;
        const std::uint8_t v = occ[idx];
        inside[k] += v;
        bool edge = false;
        if (i > 0) edge |= occ[idx - 1] != v;
        if (i + 1 < nx) edge |= occ[idx + 1] != v;
        if (j > 0) edge |= occ[idx - sy] != v;
        if (j + 1 < ny) edge |= occ[idx + sy] != v;
        if (k > 0) edge |= occ[idx - sz] != v;
        if (k + 1 < nz) edge |= occ[idx + sz] != v;
        boundary[k] += edge;
      }
    }
  });
  for (std::size_t k = 0; k < nz; ++k) {
    est.inside_cells += inside[k];
    est.boundary_cells += boundary[k];
  }
  const double cell = pitch * pitch * pitch;
  est.volume = static_cast<double>(est.inside_cells) * cell;
  est.error_bound = static_cast<double>(est.boundary_cells) * cell;
  return est;
}

// ---------------------------------------------------------------- touches

namespace {

constexpr double kTouchSlack = 1e-9;

struct Prism {
  bool circle = false;
  Vec2 c;
  Vec2 u{1, 0}, v{0, 1};  // rectangle axes
  double hx = 0, hy = 0, r = 0;
  double z0 = 0, z1 = 0;
};

void collect(const Solid& s, std::vector<Prism>& out) {
  switch (s.kind()) {
    case Solid::Kind::Empty:
      return;
    case Solid::Kind::Box: {
      const BoxZ& b = s.box();
      const auto [c, sn] = cos_sin(b.yaw_deg);
      Prism p;
      p.c = {b.center.x, b.center.y};
      p.u = {c, sn};
      p.v = {-sn, c};
      p.hx = b.half_extents.x;
      p.hy = b.half_extents.y;
      p.z0 = b.center.z - b.half_extents.z;
      p.z1 = b.center.z + b.half_extents.z;
      out.push_back(p);
      return;
    }
    case Solid::Kind::Cylinder: {
      const CylinderZ& cy = s.cylinder();
      Prism p;
      p.circle = true;
      p.c = {cy.base_center.x, cy.base_center.y};
      p.r = cy.radius;
      p.z0 = cy.base_center.z;
      p.z1 = cy.base_center.z + cy.height;
      out.push_back(p);
      return;
    }
    case Solid::Kind::Union:
      for (const Solid& c : s.operands()) collect(c, out);
      return;
    default:
      invalid("touch test supports unions of boxes and cylinders only");
  }
}

double rect_radius(const Prism& p, Vec2 axis) { return p.hx * std::fabs(dot(p.u, axis)) + p.hy * std::fabs(dot(p.v, axis)); }

bool rect_rect(const Prism& a, const Prism& b) {
  const Vec2 d = b.c - a.c;
  for (Vec2 axis : {a.u, a.v, b.u, b.v}) {
    if (std::fabs(dot(d, axis)) > rect_radius(a, axis) + rect_radius(b, axis) + kTouchSlack) return false;
  }
  return true;
}

bool circle_rect(const Prism& circ, const Prism& rect) {
  const Vec2 d = circ.c - rect.c;
  const double lx = dot(d, rect.u), ly = dot(d, rect.v);
  const double qx = std::clamp(lx, -rect.hx, rect.hx), qy = std::clamp(ly, -rect.hy, rect.hy);
  return std::hypot(lx - qx, ly - qy) <= circ.r + kTouchSlack;
}

bool prism_touch(const Prism& a, const Prism& b) {
  if (a.z0 > b.z1 + kTouchSlack || b.z0 > a.z1 + kTouchSlack) return false;
  if (a.circle && b.circle) return distance(a.c, b.c) <= a.r + b.r + kTouchSlack;
  if (a.circle) return circle_rect(a, b);
  if (b.circle) return circle_rect(b, a);
  return rect_rect(a, b);
}

}  // namespace

bool touches(const Solid& a, const Solid& b) {
  std::vector<Prism> pa, pb;
  collect(a, pa);
  collect(b, pb);
  for (const Prism& x : pa)
    for (const Prism& y : pb)
      if (prism_touch(x, y)) return true;
  return false;
}

}  // namespace dissolv::geom
