#pragma once

// Batched signed-distance kernels for the CSG primitives.
//
// Every entry point has a scalar reference implementation and, where the
// target supports it, a vector implementation. Vector variants perform the
// same IEEE operations in the same order as the scalar code (no FMA, same
// min/max operand selection), so results are bit-identical and the choice
// of variant never changes a mesh or a volume.

#include <cstddef>
#include <string_view>

namespace dissolv::simd {

/// Box rotated about Z. cos/sin are of the yaw angle.
struct BoxParams {
  double cx, cy, cz;
  double hx, hy, hz;
  double cos_yaw, sin_yaw;
};

struct CylinderParams {
  double cx, cy;
  double zmid, half_height;
  double radius;
};

/// Z-extruded polygon. Edge k runs from (ax[k], ay[k]) to (bx[k], by[k]);
/// ex/ey = b - a, inv_len2 = 1/|e|^2 (0 for degenerate edges) and
/// slope = ex/ey (0 for horizontal edges).
struct PolygonParams {
  const double* ax;
  const double* ay;
  const double* by;
  const double* ex;
  const double* ey;
  const double* inv_len2;
  const double* slope;
  std::size_t edges;
  double zmid, half_height;
};

struct Kernels {
  std::string_view name;

  void (*box_sdf)(const BoxParams&, const double* x, const double* y, const double* z, double* out,
                  std::size_t n);
  void (*cylinder_sdf)(const CylinderParams&, const double* x, const double* y, const double* z, double* out,
                       std::size_t n);
  void (*polygon_sdf)(const PolygonParams&, const double* x, const double* y, const double* z, double* out,
                      std::size_t n);

  /// acc[i] = min(acc[i], v[i])
  void (*min_inplace)(double* acc, const double* v, std::size_t n);
  /// acc[i] = max(acc[i], v[i])
  void (*max_inplace)(double* acc, const double* v, std::size_t n);
  /// acc[i] = max(acc[i], -v[i])
  void (*max_neg_inplace)(double* acc, const double* v, std::size_t n);
  /// v[i] = min(max(v[i], -band), band)
  void (*clamp_inplace)(double* v, double band, std::size_t n);
};

const Kernels& scalar_kernels();

/// AVX2 variant, or nullptr when it was not compiled in or the running CPU
/// lacks AVX2.
const Kernels* avx2_kernels();

/// Variant used by default: the widest supported one, unless the
/// DISSOLVPCB_SIMD environment variable is set to "scalar".
const Kernels& active_kernels();

}  // namespace dissolv::simd
