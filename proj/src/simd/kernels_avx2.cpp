// AVX2 kernels. Built with -mavx2 only (no -mfma) so every lane performs
// exactly the scalar reference's operations.

#include <immintrin.h>

#include "dissolv/simd/kernels.hpp"
#include "kernels_common.hpp"

namespace dissolv::simd {

namespace {

constexpr std::size_t W = 4;

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

void box_sdf(const BoxParams& b, const double* x, const double* y, const double* z, double* out, std::size_t n) {
  const __m256d cx = _mm256_set1_pd(b.cx), cy = _mm256_set1_pd(b.cy), cz = _mm256_set1_pd(b.cz);
  const __m256d hx = _mm256_set1_pd(b.hx), hy = _mm256_set1_pd(b.hy), hz = _mm256_set1_pd(b.hz);
  const __m256d c = _mm256_set1_pd(b.cos_yaw), s = _mm256_set1_pd(b.sin_yaw);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), cx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), cy);
    const __m256d qx = _mm256_add_pd(_mm256_mul_pd(dx, c), _mm256_mul_pd(dy, s));
    const __m256d qy = _mm256_sub_pd(_mm256_mul_pd(dy, c), _mm256_mul_pd(dx, s));
    const __m256d qz = _mm256_sub_pd(_mm256_loadu_pd(z + i), cz);
    const __m256d ax = _mm256_sub_pd(vabs(qx), hx);
    const __m256d ay = _mm256_sub_pd(vabs(qy), hy);
    const __m256d az = _mm256_sub_pd(vabs(qz), hz);
    const __m256d ox = _mm256_max_pd(ax, zero), oy = _mm256_max_pd(ay, zero), oz = _mm256_max_pd(az, zero);
    const __m256d len2 =
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(ox, ox), _mm256_mul_pd(oy, oy)), _mm256_mul_pd(oz, oz));
    const __m256d inside = _mm256_min_pd(_mm256_max_pd(ax, _mm256_max_pd(ay, az)), zero);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_sqrt_pd(len2), inside));
  }
  if (i < n) scalar_kernels().box_sdf(b, x + i, y + i, z + i, out + i, n - i);
}

void cylinder_sdf(const CylinderParams& c, const double* x, const double* y, const double* z, double* out,
                  std::size_t n) {
  const __m256d cx = _mm256_set1_pd(c.cx), cy = _mm256_set1_pd(c.cy);
  const __m256d zmid = _mm256_set1_pd(c.zmid), hh = _mm256_set1_pd(c.half_height);
  const __m256d r = _mm256_set1_pd(c.radius);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), cx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), cy);
    const __m256d ar = _mm256_sub_pd(_mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy))), r);
    const __m256d az = _mm256_sub_pd(vabs(_mm256_sub_pd(_mm256_loadu_pd(z + i), zmid)), hh);
    const __m256d orr = _mm256_max_pd(ar, zero), oz = _mm256_max_pd(az, zero);
    const __m256d outside = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(orr, orr), _mm256_mul_pd(oz, oz)));
    const __m256d inside = _mm256_min_pd(_mm256_max_pd(ar, az), zero);
    _mm256_storeu_pd(out + i, _mm256_add_pd(outside, inside));
  }
  if (i < n) scalar_kernels().cylinder_sdf(c, x + i, y + i, z + i, out + i, n - i);
}

void polygon_sdf(const PolygonParams& p, const double* x, const double* y, const double* z, double* out,
                 std::size_t n) {
  const __m256d zero = _mm256_setzero_pd(), one = _mm256_set1_pd(1.0);
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d zmid = _mm256_set1_pd(p.zmid), hh = _mm256_set1_pd(p.half_height);
  std::size_t i = 0;
  for (; i + W <= n; i += W) {
    const __m256d px = _mm256_loadu_pd(x + i), py = _mm256_loadu_pd(y + i);
    __m256d d2 = _mm256_set1_pd(detail::kFar);
    __m256d inside = _mm256_setzero_pd();  // all-ones lanes = inside
    for (std::size_t k = 0; k < p.edges; ++k) {
      const __m256d ax = _mm256_set1_pd(p.ax[k]), ay = _mm256_set1_pd(p.ay[k]);
      const __m256d ex = _mm256_set1_pd(p.ex[k]), ey = _mm256_set1_pd(p.ey[k]);
      const __m256d wx = _mm256_sub_pd(px, ax), wy = _mm256_sub_pd(py, ay);
      __m256d t = _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(wx, ex), _mm256_mul_pd(wy, ey)),
                                _mm256_set1_pd(p.inv_len2[k]));
      t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
      const __m256d dx = _mm256_sub_pd(wx, _mm256_mul_pd(ex, t));
      const __m256d dy = _mm256_sub_pd(wy, _mm256_mul_pd(ey, t));
      d2 = _mm256_min_pd(d2, _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));

      const __m256d above_a = _mm256_cmp_pd(ay, py, _CMP_GT_OQ);
      const __m256d above_b = _mm256_cmp_pd(_mm256_set1_pd(p.by[k]), py, _CMP_GT_OQ);
      const __m256d straddle = _mm256_xor_pd(above_a, above_b);
      const __m256d xint = _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(py, ay), _mm256_set1_pd(p.slope[k])), ax);
      const __m256d left = _mm256_cmp_pd(px, xint, _CMP_LT_OQ);
      inside = _mm256_xor_pd(inside, _mm256_and_pd(straddle, left));
    }
    const __m256d dist = _mm256_sqrt_pd(d2);
    const __m256d s = _mm256_xor_pd(dist, _mm256_and_pd(inside, sign));
    const __m256d az = _mm256_sub_pd(vabs(_mm256_sub_pd(_mm256_loadu_pd(z + i), zmid)), hh);
    const __m256d os = _mm256_max_pd(s, zero), oz = _mm256_max_pd(az, zero);
    const __m256d outside = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(os, os), _mm256_mul_pd(oz, oz)));
    _mm256_storeu_pd(out + i, _mm256_add_pd(outside, _mm256_min_pd(_mm256_max_pd(s, az), zero)));
  }
  if (i < n) scalar_kernels().polygon_sdf(p, x + i, y + i, z + i, out + i, n - i);
}

void min_inplace(double* acc, const double* v, std::size_t n) {
  std::size_t i = 0;
  for (; i + W <= n; i += W)
    _mm256_storeu_pd(acc + i, _mm256_min_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(v + i)));
  for (; i < n; ++i) acc[i] = detail::vmin(acc[i], v[i]);
}

void max_inplace(double* acc, const double* v, std::size_t n) {
  std::size_t i = 0;
  for (; i + W <= n; i += W)
    _mm256_storeu_pd(acc + i, _mm256_max_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(v + i)));
  for (; i < n; ++i) acc[i] = detail::vmax(acc[i], v[i]);
}

void max_neg_inplace(double* acc, const double* v, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + W <= n; i += W)
    _mm256_storeu_pd(acc + i,
                     _mm256_max_pd(_mm256_loadu_pd(acc + i), _mm256_xor_pd(_mm256_loadu_pd(v + i), sign)));
  for (; i < n; ++i) acc[i] = detail::vmax(acc[i], -v[i]);
}

void clamp_inplace(double* v, double band, std::size_t n) {
  const __m256d hi = _mm256_set1_pd(band), lo = _mm256_set1_pd(-band);
  std::size_t i = 0;
  for (; i + W <= n; i += W) _mm256_storeu_pd(v + i, _mm256_min_pd(_mm256_max_pd(_mm256_loadu_pd(v + i), lo), hi));
  for (; i < n; ++i) v[i] = detail::vmin(detail::vmax(v[i], -band), band);
}

}  // namespace

namespace detail {
const Kernels& avx2_table() {
  static const Kernels k{"avx2", box_sdf, cylinder_sdf, polygon_sdf, min_inplace, max_inplace, max_neg_inplace,
                         clamp_inplace};
  return k;
}
}  // namespace detail

}  // namespace dissolv::simd
