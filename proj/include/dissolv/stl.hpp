#pragma once

#include <string>
#include <string_view>

#include "dissolv/meshing.hpp"

namespace dissolv {

enum class StlMode { Ascii, Binary };

/// Serialized STL. ASCII numbers use six significant digits in scientific
/// notation with a bare exponent ("1.00000e0", "-2.50000e-3"); binary uses
/// little-endian float32 regardless of host byte order.
std::string write_stl(const TriangleMesh& m, StlMode mode, std::string_view name = "dissolvpcb");

/// Number formatter used for ASCII output.
std::string format_stl_number(double v);

/// Unit facet normal from the winding, or zero for degenerate triangles.
Vec3 facet_normal(const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace dissolv
