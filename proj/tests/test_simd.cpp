#include <cstring>
#include <vector>

#include "doctest.h"
#include "dissolv/field.hpp"
#include "dissolv/geom.hpp"
#include "random_solids.hpp"

using namespace dissolv;
using namespace dissolv::geom;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> row_x(double x0, double step, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = x0 + (static_cast<double>(i) + 0.5) * step;
  return x;
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("active variant is one of the known kernels") {
    const auto& k = simd::active_kernels();
    CHECK((k.name == "scalar" || k.name == "avx2"));
  }

  TEST_CASE("raw kernels are bit-identical across variants") {
    const simd::Kernels* v = simd::avx2_kernels();
    if (!v) {
      MESSAGE("AVX2 unavailable; nothing to compare");
      return;
    }
    const simd::Kernels& s = simd::scalar_kernels();
    dissolv::testing::SolidGen gen(99);
    // Odd lengths exercise the vector tail path.
    for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 131u}) {
      std::vector<double> x(n), y(n), z(n), a(n), b(n);
      for (int rep = 0; rep < 40; ++rep) {
        for (std::size_t i = 0; i < n; ++i) {
          const Vec3 p = gen.point();
          x[i] = p.x, y[i] = p.y, z[i] = p.z;
        }
        const Solid prim = gen.primitive();
        if (prim.kind() == Solid::Kind::Box) {
          const auto bp = kernel_params(prim.box());
          s.box_sdf(bp, x.data(), y.data(), z.data(), a.data(), n);
          v->box_sdf(bp, x.data(), y.data(), z.data(), b.data(), n);
        } else if (prim.kind() == Solid::Kind::Cylinder) {
          const auto cp = kernel_params(prim.cylinder());
          s.cylinder_sdf(cp, x.data(), y.data(), z.data(), a.data(), n);
          v->cylinder_sdf(cp, x.data(), y.data(), z.data(), b.data(), n);
        } else {
          const auto pp = prim.polygon_params();
          s.polygon_sdf(pp, x.data(), y.data(), z.data(), a.data(), n);
          v->polygon_sdf(pp, x.data(), y.data(), z.data(), b.data(), n);
        }
        CHECK(same_bits(a, b));

        std::vector<double> acc1 = a, acc2 = a;
        s.min_inplace(acc1.data(), x.data(), n);
        v->min_inplace(acc2.data(), x.data(), n);
        CHECK(same_bits(acc1, acc2));
        s.max_neg_inplace(acc1.data(), y.data(), n);
        v->max_neg_inplace(acc2.data(), y.data(), n);
        CHECK(same_bits(acc1, acc2));
        s.max_inplace(acc1.data(), z.data(), n);
        v->max_inplace(acc2.data(), z.data(), n);
        CHECK(same_bits(acc1, acc2));
        s.clamp_inplace(acc1.data(), 0.4, n);
        v->clamp_inplace(acc2.data(), 0.4, n);
        CHECK(same_bits(acc1, acc2));
      }
    }
  }

  TEST_CASE("min/max keep the operand order of the vector instructions") {
    const simd::Kernels* v = simd::avx2_kernels();
    if (!v) return;
    const simd::Kernels& s = simd::scalar_kernels();
    // Signed zeros distinguish which operand is returned on ties.
    std::vector<double> a{0.0, -0.0, 0.0, -0.0, 1.0}, b{-0.0, 0.0, 0.0, -0.0, 1.0};
    auto a1 = a, a2 = a;
    s.min_inplace(a1.data(), b.data(), a.size());
    v->min_inplace(a2.data(), b.data(), a.size());
    CHECK(same_bits(a1, a2));
    a1 = a, a2 = a;
    s.max_inplace(a1.data(), b.data(), a.size());
    v->max_inplace(a2.data(), b.data(), a.size());
    CHECK(same_bits(a1, a2));
  }

  TEST_CASE("field rows are bit-identical across variants") {
    const simd::Kernels* v = simd::avx2_kernels();
    if (!v) return;
    dissolv::testing::SolidGen gen(1234);
    FieldProgram::Scratch s1, s2;
    for (int t = 0; t < 40; ++t) {
      const Solid s = gen.tree(3);
      const FieldProgram ps(s, simd::scalar_kernels());
      const FieldProgram pv(s, *v);
      const auto x = row_x(-5, 0.07, 143);
      std::vector<double> a(x.size()), b(x.size());
      std::vector<std::uint8_t> ma(x.size()), mb(x.size());
      for (int r = 0; r < 30; ++r) {
        const double y = gen.u(-5, 5), z = gen.u(-0.5, 3.5);
        ps.sdf_row(x.data(), x.size(), y, z, 0.3, a.data(), s1);
        pv.sdf_row(x.data(), x.size(), y, z, 0.3, b.data(), s2);
        CHECK(same_bits(a, b));
        ps.contains_row(x.data(), x.size(), y, z, ma.data(), s1);
        pv.contains_row(x.data(), x.size(), y, z, mb.data(), s2);
        CHECK(ma == mb);
      }
    }
  }

  TEST_CASE("row evaluation equals clamped pointwise evaluation") {
    dissolv::testing::SolidGen gen(77);
    FieldProgram::Scratch sc;
    for (int t = 0; t < 40; ++t) {
      const Solid s = gen.tree(3);
      const FieldProgram prog(s);
      const auto x = row_x(-5, 0.09, 111);
      std::vector<double> out(x.size());
      std::vector<std::uint8_t> mask(x.size());
      for (int r = 0; r < 20; ++r) {
        const double y = gen.u(-5, 5), z = gen.u(-0.5, 3.5);
        const double band = 0.25;
        prog.sdf_row(x.data(), x.size(), y, z, band, out.data(), sc);
        prog.contains_row(x.data(), x.size(), y, z, mask.data(), sc);
        for (std::size_t i = 0; i < x.size(); ++i) {
          const Vec3 p{x[i], y, z};
          const double d = std::min(std::max(sdf(s, p), -band), band);
          CHECK(out[i] == d);
          CHECK(static_cast<bool>(mask[i]) == contains(s, p));
        }
      }
    }
  }
}
