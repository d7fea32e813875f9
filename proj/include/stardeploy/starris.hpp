#pragma once

#include <span>
#include <vector>

#include "stardeploy/cmatrix.hpp"
#include "stardeploy/geometry.hpp"

namespace stardeploy {

// Energy-splitting element state. beta is the reflection amplitude; the
// transmission amplitude is sqrt(1 - beta^2). Phases live in (-pi, pi].
struct StarElements {
  std::vector<double> beta;
  std::vector<double> theta_t;
  std::vector<double> theta_r;

  std::size_t size() const { return beta.size(); }

  // beta * sqrt(1 - beta^2) * cos(theta_r - theta_t) for element n.
  double coupling_residual(std::size_t n) const;

  // Throws InvalidElementState when shapes, ranges or the phase coupling
  // (residual within 1e-9) do not hold.
  void validate() const;
};

// A diagonal N x N matrix stored by its diagonal; off-diagonals are zero.
struct DiagonalMatrix {
  CVector diag;

  std::size_t size() const { return diag.size(); }
  CMatrix to_dense() const;
  static DiagonalMatrix zeros(std::size_t n) { return {CVector(n)}; }
};

struct StarMatrices {
  DiagonalMatrix reflection;    // Theta_R
  DiagonalMatrix transmission;  // Theta_T

  // Both zero: models a deployment without a STAR-RIS.
  static StarMatrices disabled(std::size_t n) {
    return {DiagonalMatrix::zeros(n), DiagonalMatrix::zeros(n)};
  }
};

StarMatrices build_matrices(const StarElements& e);

const DiagonalMatrix& select_theta(Region region, const StarMatrices& mats);

// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

}  // namespace stardeploy
