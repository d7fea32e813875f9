#include "stardeploy/starris.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "stardeploy/error.hpp"

namespace stardeploy {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kResidualTol = 1e-9;
}  // namespace

double wrap_phase(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double StarElements::coupling_residual(std::size_t n) const {
  return beta[n] * std::sqrt(1.0 - beta[n] * beta[n]) * std::cos(theta_r[n] - theta_t[n]);
}

void StarElements::validate() const {
  if (theta_t.size() != beta.size() || theta_r.size() != beta.size()) {
    throw InvalidElementState("element vectors differ in length");
  }
  for (std::size_t n = 0; n < beta.size(); ++n) {
    if (!(beta[n] >= 0.0 && beta[n] <= 1.0)) {
      throw InvalidElementState("beta[" + std::to_string(n) + "] outside [0, 1]");
    }
    if (!(theta_t[n] > -kPi && theta_t[n] <= kPi) || !(theta_r[n] > -kPi && theta_r[n] <= kPi)) {
      throw InvalidElementState("phase of element " + std::to_string(n) + " outside (-pi, pi]");
    }
    if (std::abs(coupling_residual(n)) > kResidualTol) {
      throw InvalidElementState("element " + std::to_string(n) +
                                " violates the energy-splitting phase coupling");
    }
  }
}

CMatrix DiagonalMatrix::to_dense() const {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

StarMatrices build_matrices(const StarElements& e) {
  e.validate();
  const std::size_t n = e.size();
  StarMatrices out{DiagonalMatrix::zeros(n), DiagonalMatrix::zeros(n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.reflection.diag[i] = std::polar(e.beta[i], e.theta_r[i]);
    out.transmission.diag[i] = std::polar(std::sqrt(1.0 - e.beta[i] * e.beta[i]), e.theta_t[i]);
  }
  return out;
}

const DiagonalMatrix& select_theta(Region region, const StarMatrices& mats) {
  return region == Region::Reflection ? mats.reflection : mats.transmission;
}

}  // namespace stardeploy
