#include "dissolv/stl.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

namespace dissolv {

std::string format_stl_number(double v) {
  if (v == 0.0 || !std::isfinite(v)) v = 0.0;  // folds -0 as well
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  // "d.ddddde[+-]XX" -> "d.ddddde[-]X"
  std::string s(buf);
  const auto e = s.find('e');
  std::string mantissa = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  bool negative = false;
  if (!exp.empty() && (exp[0] == '+' || exp[0] == '-')) {
    negative = exp[0] == '-';
    exp.erase(0, 1);
  }
  const auto nz = exp.find_first_not_of('0');
  exp = nz == std::string::npos ? "0" : exp.substr(nz);
  if (exp == "0") negative = false;
  return mantissa + "e" + (negative ? "-" : "") + exp;
}

Vec3 facet_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = cross(b - a, c - a);
  const double len = norm(n);
  if (!(len > 0)) return {0, 0, 0};
  return {n.x / len, n.y / len, n.z / len};
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, double v) {
  float f = static_cast<float>(v);
  if (f == 0.0f) f = 0.0f;
  put_u32(out, std::bit_cast<std::uint32_t>(f));
}

void put_vec(std::string& out, const Vec3& v) {
  put_f32(out, v.x);
  put_f32(out, v.y);
  put_f32(out, v.z);
}

std::string ascii_vec(const Vec3& v) {
  return format_stl_number(v.x) + " " + format_stl_number(v.y) + " " + format_stl_number(v.z);
}

}  // namespace

std::string write_stl(const TriangleMesh& m, StlMode mode, std::string_view name) {
  std::string out;
  if (mode == StlMode::Binary) {
    char header[80] = {};
    const char tag[] = "dissolvpcb binary STL";
    std::memcpy(header, tag, sizeof tag - 1);
    out.assign(header, sizeof header);
    put_u32(out, static_cast<std::uint32_t>(m.triangles.size()));
    out.reserve(84 + 50 * m.triangles.size());
    for (const auto& t : m.triangles) {
      const Vec3 &a = m.vertices[t[0]], &b = m.vertices[t[1]], &c = m.vertices[t[2]];
      put_vec(out, facet_normal(a, b, c));
      put_vec(out, a);
      put_vec(out, b);
      put_vec(out, c);
      out.push_back('\0');
      out.push_back('\0');
    }
    return out;
  }

  out += "solid ";
  out += name;
  out += '\n';
  for (const auto& t : m.triangles) {
    const Vec3 &a = m.vertices[t[0]], &b = m.vertices[t[1]], &c = m.vertices[t[2]];
    out += "  facet normal " + ascii_vec(facet_normal(a, b, c)) + "\n";
    out += "    outer loop\n";
    out += "      vertex " + ascii_vec(a) + "\n";
    out += "      vertex " + ascii_vec(b) + "\n";
    out += "      vertex " + ascii_vec(c) + "\n";
    out += "    endloop\n";
    out += "  endfacet\n";
  }
  out += "endsolid ";
  out += name;
  out += '\n';
  return out;
}

}  // namespace dissolv
