#include <cstdlib>
#include <string_view>

#include "dissolv/simd/kernels.hpp"

namespace dissolv::simd {

#if defined(DISSOLV_HAVE_AVX2_TU)
namespace detail {
const Kernels& avx2_table();
}
#endif

const Kernels* avx2_kernels() {
#if defined(DISSOLV_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const Kernels& active_kernels() {
  static const Kernels& chosen = [] () -> const Kernels& {
    const char* env = std::getenv("DISSOLVPCB_SIMD");
    if (env && std::string_view(env) == "scalar") return scalar_kernels();
    if (const Kernels* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace dissolv::simd
