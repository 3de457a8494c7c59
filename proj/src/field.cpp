#include "dissolv/field.hpp"

#include <algorithm>

namespace dissolv::geom {

namespace {

// Membership culling slack: rounding in the rotated-box bound must never
// exclude a point the kernel would accept.
constexpr double kMaskSlack = 1e-9;

}  // namespace

FieldProgram::FieldProgram(const Solid& s, const simd::Kernels& kernels) : root_(s), kernels_(&kernels) {
  root_op_ = compile(root_);
  depth_ = root_.depth();
}

std::size_t FieldProgram::compile(const Solid& s) {
  Op op;
  op.kind = s.kind();
  op.bounds = s.bounds();
  switch (s.kind()) {
    case Solid::Kind::Box:
      op.box = kernel_params(s.box());
      break;
    case Solid::Kind::Cylinder:
      op.cyl = kernel_params(s.cylinder());
      break;
    case Solid::Kind::Extrusion:
      op.poly = s.polygon_params();
      break;
    default:
      break;
  }
  std::vector<std::size_t> kids;
  for (const Solid& c : s.operands()) kids.push_back(compile(c));
  op.first_child = children_.size();
  op.child_count = kids.size();
  children_.insert(children_.end(), kids.begin(), kids.end());
  ops_.push_back(op);
  return ops_.size() - 1;
}

void FieldProgram::prepare(Scratch& sc, std::size_t n, double y, double z) const {
  if (sc.y.size() < n) {
    sc.y.resize(n);
    sc.z.resize(n);
  }
  std::fill_n(sc.y.begin(), n, y);
  std::fill_n(sc.z.begin(), n, z);
  if (sc.sdf.size() < depth_ + 1) {
    sc.sdf.resize(depth_ + 1);
    sc.mask.resize(depth_ + 1);
  }
  for (std::size_t d = 0; d <= depth_; ++d) {
    if (sc.sdf[d].size() < n) {
      sc.sdf[d].resize(n);
      sc.mask[d].resize(n);
    }
  }
}

namespace {

// Index range [a, e) within [lo, hi) whose points can lie inside `b`
// inflated by r. Returns false when the row misses the box entirely.
bool row_range(const Aabb& box, double r, const double* x, std::size_t lo, std::size_t hi, double y, double z,
               std::size_t& a, std::size_t& e) {
  if (box.empty()) return false;
  const Aabb b = box.inflated(r);
  if (y < b.min.y || y > b.max.y || z < b.min.z || z > b.max.z) return false;
  a = static_cast<std::size_t>(std::lower_bound(x + lo, x + hi, b.min.x) - x);
  e = static_cast<std::size_t>(std::upper_bound(x + a, x + hi, b.max.x) - x);
  return a < e;
}

}  // namespace

void FieldProgram::sdf_row(const double* x, std::size_t n, double y, double z, double band, double* out,
                           Scratch& sc) const {
  if (n == 0) return;
  prepare(sc, n, y, z);
  std::size_t a = 0, e = 0;
  if (!row_range(ops_[root_op_].bounds, band, x, 0, n, y, z, a, e)) {
    std::fill_n(out, n, band);
    return;
  }
  std::fill(out, out + a, band);
  std::fill(out + e, out + n, band);
  eval_sdf(root_op_, 0, x, a, e, y, z, band, out, sc);
}

void FieldProgram::eval_sdf(std::size_t idx, std::size_t depth, const double* x, std::size_t lo, std::size_t hi,
                            double y, double z, double band, double* out, Scratch& sc) const {
  const Op& op = ops_[idx];
  const simd::Kernels& k = *kernels_;
  const double* ys = sc.y.data() + lo;
  const double* zs = sc.z.data() + lo;
  const std::size_t n = hi - lo;
  switch (op.kind) {
    case Solid::Kind::Empty:
      std::fill(out + lo, out + hi, band);
      return;
    case Solid::Kind::Box:
      k.box_sdf(op.box, x + lo, ys, zs, out + lo, n);
      k.clamp_inplace(out + lo, band, n);
      return;
    case Solid::Kind::Cylinder:
      k.cylinder_sdf(op.cyl, x + lo, ys, zs, out + lo, n);
      k.clamp_inplace(out + lo, band, n);
      return;
    case Solid::Kind::Extrusion:
      k.polygon_sdf(op.poly, x + lo, ys, zs, out + lo, n);
      k.clamp_inplace(out + lo, band, n);
      return;
    default:
      break;
  }

  double* tmp = sc.sdf[depth + 1].data();
  const std::size_t* kids = children_.data() + op.first_child;
  std::size_t a = 0, e = 0;

  if (op.kind == Solid::Kind::Union) {
    // Children missing the row are exactly +band after clamping, which is
    // the identity of min over [-band, band].
    std::fill(out + lo, out + hi, band);
    for (std::size_t c = 0; c < op.child_count; ++c) {
      if (!row_range(ops_[kids[c]].bounds, band, x, lo, hi, y, z, a, e)) continue;
      eval_sdf(kids[c], depth + 1, x, a, e, y, z, band, tmp, sc);
      k.min_inplace(out + a, tmp + a, e - a);
    }
    return;
  }

  if (op.kind == Solid::Kind::Intersection) {
    std::fill(out + lo, out + hi, -band);
    for (std::size_t c = 0; c < op.child_count; ++c) {
      if (!row_range(ops_[kids[c]].bounds, band, x, lo, hi, y, z, a, e)) {
        std::fill(out + lo, out + hi, band);
        return;
      }
      std::fill(tmp + lo, tmp + a, band);
      std::fill(tmp + e, tmp + hi, band);
      eval_sdf(kids[c], depth + 1, x, a, e, y, z, band, tmp, sc);
      k.max_inplace(out + lo, tmp + lo, n);
    }
    return;
  }

  // Difference: max(base, -sub...). A subtrahend missing the row is +band,
  // contributing -band, which never raises the maximum.
  if (!row_range(ops_[kids[0]].bounds, band, x, lo, hi, y, z, a, e)) {
    std::fill(out + lo, out + hi, band);
    return;
  }
  std::fill(out + lo, out + a, band);
  std::fill(out + e, out + hi, band);
  eval_sdf(kids[0], depth + 1, x, a, e, y, z, band, out, sc);
  const std::size_t blo = a, bhi = e;
  for (std::size_t c = 1; c < op.child_count; ++c) {
    if (!row_range(ops_[kids[c]].bounds, band, x, blo, bhi, y, z, a, e)) continue;
    eval_sdf(kids[c], depth + 1, x, a, e, y, z, band, tmp, sc);
    k.max_neg_inplace(out + a, tmp + a, e - a);
  }
}

void FieldProgram::contains_row(const double* x, std::size_t n, double y, double z, std::uint8_t* out,
                                Scratch& sc) const {
  if (n == 0) return;
  prepare(sc, n, y, z);
  std::fill_n(out, n, std::uint8_t{0});
  std::size_t a = 0, e = 0;
  if (!row_range(ops_[root_op_].bounds, kMaskSlack, x, 0, n, y, z, a, e)) return;
  eval_mask(root_op_, 0, x, a, e, y, z, out, sc);
}

void FieldProgram::eval_mask(std::size_t idx, std::size_t depth, const double* x, std::size_t lo, std::size_t hi,
                             double y, double z, std::uint8_t* out, Scratch& sc) const {
  const Op& op = ops_[idx];
  const simd::Kernels& k = *kernels_;
  const std::size_t n = hi - lo;

  if (op.kind == Solid::Kind::Empty) {
    std::fill(out + lo, out + hi, std::uint8_t{0});
    return;
  }
  if (op.kind == Solid::Kind::Box || op.kind == Solid::Kind::Cylinder || op.kind == Solid::Kind::Extrusion) {
    double* v = sc.sdf[depth].data();
    const double* ys = sc.y.data() + lo;
    const double* zs = sc.z.data() + lo;
    if (op.kind == Solid::Kind::Box)
      k.box_sdf(op.box, x + lo, ys, zs, v + lo, n);
    else if (op.kind == Solid::Kind::Cylinder)
      k.cylinder_sdf(op.cyl, x + lo, ys, zs, v + lo, n);
    else
      k.polygon_sdf(op.poly, x + lo, ys, zs, v + lo, n);
    for (std::size_t i = lo; i < hi; ++i) out[i] = v[i] <= 0.0;
    return;
  }

  std::uint8_t* tmp = sc.mask[depth + 1].data();
  const std::size_t* kids = children_.data() + op.first_child;
  std::size_t a = 0, e = 0;

  if (op.kind == Solid::Kind::Union) {
    std::fill(out + lo, out + hi, std::uint8_t{0});
    for (std::size_t c = 0; c < op.child_count; ++c) {
      if (!row_range(ops_[kids[c]].bounds, kMaskSlack, x, lo, hi, y, z, a, e)) continue;
      eval_mask(kids[c], depth + 1, x, a, e, y, z, tmp, sc);
      for (std::size_t i = a; i < e; ++i) out[i] |= tmp[i];
    }
    return;
  }

  if (op.kind == Solid::Kind::Intersection) {
    std::fill(out + lo, out + hi, std::uint8_t{1});
    for (std::size_t c = 0; c < op.child_count; ++c) {
      if (!row_range(ops_[kids[c]].bounds, kMaskSlack, x, lo, hi, y, z, a, e)) {
        std::fill(out + lo, out + hi, std::uint8_t{0});
        return;
      }
      std::fill(out + lo, out + a, std::uint8_t{0});
      std::fill(out + e, out + hi, std::uint8_t{0});
      eval_mask(kids[c], depth + 1, x, a, e, y, z, tmp, sc);
      for (std::size_t i = a; i < e; ++i) out[i] &= tmp[i];
    }
    return;
  }

  std::fill(out + lo, out + hi, std::uint8_t{0});
  if (!row_range(ops_[kids[0]].bounds, kMaskSlack, x, lo, hi, y, z, a, e)) return;
  eval_mask(kids[0], depth + 1, x, a, e, y, z, out, sc);
  const std::size_t blo = a, bhi = e;
  for (std::size_t c = 1; c < op.child_count; ++c) {
    if (!row_range(ops_[kids[c]].bounds, kMaskSlack, x, blo, bhi, y, z, a, e)) continue;
    eval_mask(kids[c], depth + 1, x, a, e, y, z, tmp, sc);
    for (std::size_t i = a; i < e; ++i) out[i] &= static_cast<std::uint8_t>(!tmp[i]);
  }
}

}  // namespace dissolv::geom
