#pragma once

namespace dissolv::simd::detail {

// Operand selection matches _mm256_min_pd / _mm256_max_pd: the second
// operand is returned when the comparison is false (equal values, signed
// zeros).
inline double vmin(double a, double b) { return a < b ? a : b; }
inline double vmax(double a, double b) { return a > b ? a : b; }

// Initial squared distance for polygon edges; any real board is closer.
inline constexpr double kFar = 1e300;

}  // namespace dissolv::simd::detail
