#include <cstdlib>
#include <string_view>

#include "stardeploy/kernels.hpp"

namespace stardeploy::kernels {

namespace {

const KernelTable kScalar{Variant::Scalar, "scalar", &scalar::dot, &scalar::axpy, &scalar::cdot,
                          &scalar::caxpy};

#if defined(STARDEPLOY_HAVE_AVX2)
const KernelTable kAvx2{Variant::Avx2, "avx2", &avx2::dot, &avx2::axpy, &avx2::cdot, &avx2::caxpy};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& initial_table() {
  const char* forced = std::getenv("STARDEPLOY_SIMD");
  const std::string_view want = forced ? forced : "auto";
  if (want == "scalar") return kScalar;
  const KernelTable* simd = avx2_table();
  return simd ? *simd : kScalar;
}

const KernelTable*& current() {
  static const KernelTable* table = &initial_table();
  return table;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(STARDEPLOY_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *current(); }

bool select(Variant v) {
  switch (v) {
    case Variant::Scalar:
      current() = &kScalar;
      return true;
    case Variant::Avx2:
      if (const KernelTable* t = avx2_table()) {
        current() = t;
        return true;
      }
      return false;
  }
  return false;
}

}  // namespace stardeploy::kernels
