#pragma once

// Row-batched evaluation of a Solid for grid sampling.
//
// A row is a run of points sharing (y, z) with increasing x. Subtrees whose
// bounding box misses the row (after inflation by the clamp band) are
// skipped, and primitive kernels only run over the x sub-range that can
// reach them.

#include <cstdint>
#include <vector>

#include "dissolv/geom.hpp"
#include "dissolv/simd/kernels.hpp"

namespace dissolv::geom {

class FieldProgram {
 public:
  /// Per-thread working memory; reuse one per worker across rows.
  class Scratch {
    friend class FieldProgram;
    std::vector<double> y, z;
    std::vector<std::vector<double>> sdf;
    std::vector<std::vector<std::uint8_t>> mask;
  };

  explicit FieldProgram(const Solid& s, const simd::Kernels& kernels = simd::active_kernels());

  /// out[i] = clamp(sdf(s, (x[i], y, z)), -band, band). x must be sorted
  /// ascending. Identical for every kernel variant.
  void sdf_row(const double* x, std::size_t n, double y, double z, double band, double* out, Scratch& scratch) const;

  /// out[i] = contains(s, (x[i], y, z)) ? 1 : 0. x must be sorted ascending.
  void contains_row(const double* x, std::size_t n, double y, double z, std::uint8_t* out, Scratch& scratch) const;

  const simd::Kernels& kernels() const { return *kernels_; }

 private:
  struct Op {
    Solid::Kind kind;
    Aabb bounds;
    std::size_t first_child = 0, child_count = 0;  // into children_
    simd::BoxParams box{};
    simd::CylinderParams cyl{};
    simd::PolygonParams poly{};
  };

  std::size_t compile(const Solid& s);
  void prepare(Scratch& scratch, std::size_t n, double y, double z) const;
  void eval_sdf(std::size_t op, std::size_t depth, const double* x, std::size_t lo, std::size_t hi, double y,
                double z, double band, double* out, Scratch& scratch) const;
  void eval_mask(std::size_t op, std::size_t depth, const double* x, std::size_t lo, std::size_t hi, double y,
                 double z, std::uint8_t* out, Scratch& scratch) const;

  Solid root_;  // keeps polygon tables alive
  const simd::Kernels* kernels_;
  std::vector<Op> ops_;
  std::vector<std::size_t> children_;
  std::size_t root_op_ = 0;
  std::size_t depth_ = 1;
};

}  // namespace dissolv::geom
