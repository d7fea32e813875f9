#pragma once

#include <complex>
#include <span>
#include <string_view>

// Inner-loop arithmetic shared by the network layers and the link model.
// Every kernel has a scalar reference implementation; SIMD variants are
// selected once at startup and must agree with the reference to rounding.

namespace stardeploy::kernels {

using cplx = std::complex<double>;

enum class Variant { Scalar, Avx2 };

struct KernelTable {
  Variant variant;
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot)(std::span<const double> a, std::span<const double> b);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, std::span<const double> x, std::span<double> y);
  // sum_i a[i] * b[i] over complex values, no conjugation
  cplx (*cdot)(std::span<const cplx> a, std::span<const cplx> b);
  // y[i] += alpha * x[i] over complex values
  void (*caxpy)(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_table();

// Table chosen at first use: the best supported variant, unless the
// STARDEPLOY_SIMD environment variable forces "scalar" or "avx2".
const KernelTable& active();

// Overrides the active table; returns false if the variant is unavailable.
bool select(Variant v);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a, b);
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x, y);
}
inline cplx cdot(std::span<const cplx> a, std::span<const cplx> b) {
  return active().cdot(a, b);
}
inline void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  active().caxpy(alpha, x, y);
}

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
cplx cdot(std::span<const cplx> a, std::span<const cplx> b);
void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
}  // namespace scalar

namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
cplx cdot(std::span<const cplx> a, std::span<const cplx> b);
void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
}  // namespace avx2

}  // namespace stardeploy::kernels
