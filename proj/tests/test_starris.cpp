#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "stardeploy/error.hpp"
#include "stardeploy/starris.hpp"

using namespace stardeploy;
constexpr double kPi = std::numbers::pi;

namespace {

StarElements uniform_elements(std::size_t n, double beta, double theta_t, double theta_r) {
  return {std::vector<double>(n, beta), std::vector<double>(n, theta_t), std::vector<double>(n, theta_r)};
}

}  // namespace

TEST_CASE("full reflection and full transmission") {
  const auto refl = build_matrices(uniform_elements(4, 1.0, kPi / 2, 0.0));
  for (const auto& v : refl.reflection.diag) CHECK(v == cplx(1, 0));
  for (const auto& v : refl.transmission.diag) CHECK(std::abs(v) == 0.0);

  const auto trans = build_matrices(uniform_elements(4, 0.0, 0.0, kPi / 2));
  for (const auto& v : trans.transmission.diag) CHECK(v == cplx(1, 0));
  for (const auto& v : trans.reflection.diag) CHECK(std::abs(v) == 0.0);

  CHECK(&select_theta(Region::Reflection, refl) == &refl.reflection);
  CHECK(&select_theta(Region::Transmission, refl) == &refl.transmission);
  for (const auto& v : select_theta(Region::Transmission, refl).diag) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("Pythagorean amplitude split") {
  const auto m = build_matrices(uniform_elements(3, 0.6, 0.1, 0.1 - kPi / 2));
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(std::abs(m.reflection.diag[n]) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(std::abs(m.transmission.diag[n]) == doctest::Approx(0.8).epsilon(1e-15));
  }
}

TEST_CASE("energy conservation and coupling on random states") {
  RandomStream rng(8);
  for (int i = 0; i < 1000; ++i) {
    const auto e = oracle::random_elements(9, rng);
    const auto m = build_matrices(e);
    for (std::size_t n = 0; n < 9; ++n) {
      CHECK(std::abs(std::norm(m.reflection.diag[n]) + std::norm(m.transmission.diag[n]) - 1.0) < 1e-12);
      CHECK(std::abs(m.reflection.diag[n]) <= 1.0);
      CHECK(std::abs(m.transmission.diag[n]) <= 1.0);
      CHECK(std::abs(e.coupling_residual(n)) < 1e-9);
    }
  }
}

TEST_CASE("invalid element states are rejected") {
  CHECK_THROWS_AS(build_matrices(uniform_elements(2, 1.2, 0, kPi / 2)), InvalidElementState);
  CHECK_THROWS_AS(build_matrices(uniform_elements(2, 0.5, 0, 0.3)), InvalidElementState);  // coupling
  CHECK_THROWS_AS(build_matrices(uniform_elements(2, 0.5, 4.0, 4.0 - kPi / 2)), InvalidElementState);  // range
  StarElements ragged = uniform_elements(2, 0.5, 0, kPi / 2);
  ragged.theta_r.pop_back();
  CHECK_THROWS(build_matrices(ragged));
  // Fully reflecting or transmitting elements satisfy the coupling constraint for any phase pair.
  CHECK_NOTHROW(build_matrices(uniform_elements(2, 1.0, 0.0, 0.3)));
}

TEST_CASE("phase wrapping lands in (-pi, pi]") {
  CHECK(wrap_phase(kPi) == kPi);
  CHECK(wrap_phase(-kPi) == kPi);
  CHECK(wrap_phase(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_phase(-3 * kPi / 2) == doctest::Approx(kPi / 2));
  RandomStream rng(2);
  for (int i = 0; i < 10000; ++i) {
    const double w = wrap_phase(rng.uniform(-20, 20));
    CHECK(w > -kPi);
    CHECK(w <= kPi);
  }
}

TEST_CASE("dense form of a diagonal") {
  const auto m = build_matrices(uniform_elements(3, 0.6, 0.0, kPi / 2));
  const CMatrix d = m.reflection.to_dense();
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) CHECK(d(r, c) == (r == c ? m.reflection.diag[r] : cplx(0)));
  }
}
