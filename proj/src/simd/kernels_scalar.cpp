#include <cmath>

#include "dissolv/simd/kernels.hpp"
#include "kernels_common.hpp"

namespace dissolv::simd {

namespace {

using detail::vmax;
using detail::vmin;

void box_sdf(const BoxParams& b, const double* x, const double* y, const double* z, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - b.cx;
    const double dy = y[i] - b.cy;
    const double qx = dx * b.cos_yaw + dy * b.sin_yaw;
    const double qy = dy * b.cos_yaw - dx * b.sin_yaw;
    const double qz = z[i] - b.cz;
    const double ax = std::fabs(qx) - b.hx;
    const double ay = std::fabs(qy) - b.hy;
    const double az = std::fabs(qz) - b.hz;
    const double ox = vmax(ax, 0.0), oy = vmax(ay, 0.0), oz = vmax(az, 0.0);
    const double outside = std::sqrt(ox * ox + oy * oy + oz * oz);
    const double inside = vmin(vmax(ax, vmax(ay, az)), 0.0);
    out[i] = outside + inside;
  }
}

void cylinder_sdf(const CylinderParams& c, const double* x, const double* y, const double* z, double* out,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - c.cx;
    const double dy = y[i] - c.cy;
    const double ar = std::sqrt(dx * dx + dy * dy) - c.radius;
    const double az = std::fabs(z[i] - c.zmid) - c.half_height;
    const double orr = vmax(ar, 0.0), oz = vmax(az, 0.0);
    const double outside = std::sqrt(orr * orr + oz * oz);
    const double inside = vmin(vmax(ar, az), 0.0);
    out[i] = outside + inside;
  }
}

void polygon_sdf(const PolygonParams& p, const double* x, const double* y, const double* z, double* out,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double px = x[i], py = y[i];
    double d2 = detail::kFar;
    bool inside = false;
    for (std::size_t k = 0; k < p.edges; ++k) {
      const double wx = px - p.ax[k];
      const double wy = py - p.ay[k];
      double t = (wx * p.ex[k] + wy * p.ey[k]) * p.inv_len2[k];
      t = vmin(vmax(t, 0.0), 1.0);
      const double dx = wx - p.ex[k] * t;
      const double dy = wy - p.ey[k] * t;
      d2 = vmin(d2, dx * dx + dy * dy);
      if ((p.ay[k] > py) != (p.by[k] > py)) {
        const double xint = (py - p.ay[k]) * p.slope[k] + p.ax[k];
        if (px < xint) inside = !inside;
      }
    }
    const double dist = std::sqrt(d2);
    const double s = inside ? -dist : dist;
    const double az = std::fabs(z[i] - p.zmid) - p.half_height;
    const double os = vmax(s, 0.0), oz = vmax(az, 0.0);
    out[i] = std::sqrt(os * os + oz * oz) + vmin(vmax(s, az), 0.0);
  }
}

void min_inplace(double* acc, const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = vmin(acc[i], v[i]);
}

void max_inplace(double* acc, const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = vmax(acc[i], v[i]);
}

void max_neg_inplace(double* acc, const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = vmax(acc[i], -v[i]);
}

void clamp_inplace(double* v, double band, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] = vmin(vmax(v[i], -band), band);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar", box_sdf, cylinder_sdf, polygon_sdf, min_inplace, max_inplace, max_neg_inplace,
                         clamp_inplace};
  return k;
}

}  // namespace dissolv::simd
