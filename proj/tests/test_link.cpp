#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "stardeploy/error.hpp"
#include "stardeploy/link.hpp"

using namespace stardeploy;

namespace {

NoiseModel unit_noise(double sigma2 = 1.0) {
  NoiseModel n;
  n.sigma2 = sigma2;
  return n;
}

Beamformer random_beamformer(std::size_t m, std::size_t k, RandomStream& rng) {
  return {oracle::random_cmatrix(m, k, rng, 0.3)};
}

}  // namespace

TEST_CASE("thermal noise default") {
  CHECK(10 * std::log10(thermal_noise_watts(1e6) * 1e3) == doctest::Approx(-104.0).epsilon(1e-12));
  CHECK(NoiseModel{}.sigma2 == thermal_noise_watts(1e6));
}

TEST_CASE("effective channel") {
  RandomStream rng(4);
  const CMatrix hbr = oracle::random_cmatrix(3, 2, rng);
  const CVector hb{{0.5, -1.0}, {2.0, 0.25}};
  const CVector hr{{1, 1}, {0, -2}, {3, 0.5}};

  SUBCASE("zero coefficients leave the direct link") {
    CHECK(effective_channel(hb, hr, DiagonalMatrix::zeros(3), hbr) == hb);
  }
  SUBCASE("identity cascade returns the RIS row") {
    const CMatrix eye2 = DiagonalMatrix{CVector(2, cplx(1, 0))}.to_dense();
    const CVector zero(2);
    const CVector hr2{{1, -1}, {0.5, 3}};
    const CVector got = effective_channel(zero, hr2, DiagonalMatrix{CVector(2, cplx(1, 0))}, eye2);
    CHECK(got == hr2);
  }
  SUBCASE("explicit triple product") {
    const DiagonalMatrix theta{{std::polar(0.6, 0.3), std::polar(0.8, -2.0), std::polar(1.0, 1.0)}};
    const CVector got = effective_channel(hb, hr, theta, hbr);
    for (std::size_t m = 0; m < 2; ++m) {
      cplx want = hb[m];
      for (std::size_t n = 0; n < 3; ++n) want += hr[n] * theta.diag[n] * hbr(n, m);
      CHECK(std::abs(got[m] - want) < 1e-14 * (1 + std::abs(want)));
    }
  }
  CHECK_THROWS_AS(effective_channel(hb, CVector(2), DiagonalMatrix::zeros(3), hbr), DimensionError);
}

TEST_CASE("SINR") {
  SUBCASE("single user on a unit channel") {
    const double p = 0.7;
    Beamformer bf{CMatrix(3, 1)};
    bf.w(0, 0) = std::sqrt(p);
    const std::vector<CVector> eff{CVector{{1, 0}, {0, 0}, {0, 0}}};
    CHECK(sinr(0, bf, eff, unit_noise(1e-3)) == doctest::Approx(p / 1e-3).epsilon(1e-14));
  }
  SUBCASE("silent user") {
    RandomStream rng(1);
    Beamformer bf = random_beamformer(2, 2, rng);
    bf.w(0, 1) = bf.w(1, 1) = 0;
    const std::vector<CVector> eff{CVector{{1, 2}, {3, 4}}, CVector{{-1, 0}, {0.5, 2}}};
    CHECK(sinr(1, bf, eff, unit_noise()) == 0.0);
  }
  SUBCASE("two users, term-by-term expansion") {
    RandomStream rng(12);
    for (int trial = 0; trial < 50; ++trial) {
      const Beamformer bf = random_beamformer(3, 2, rng);
      std::vector<CVector> eff(2, CVector(3));
      for (auto& e : eff) for (auto& v : e) v = rng.complex_normal();
      for (std::size_t k = 0; k < 2; ++k) {
        const std::size_t u = 1 - k;
        cplx s = 0, i = 0;
        for (std::size_t m = 0; m < 3; ++m) {
          s += eff[k][m] * bf.w(m, k);
          i += eff[k][m] * bf.w(m, u);
        }
        const double want = std::norm(s) / (std::norm(i) + 0.2);
        CHECK(sinr(k, bf, eff, unit_noise(0.2)) == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
  SUBCASE("phase rotation of the channel leaves SINR unchanged") {
    RandomStream rng(13);
    const Beamformer bf = random_beamformer(2, 3, rng);
    std::vector<CVector> eff(3, CVector(2));
    for (auto& e : eff) for (auto& v : e) v = rng.complex_normal();
    auto rotated = eff;
    // Multiplying by i only swaps and negates components, so |.|^2 is exact.
    for (auto& v : rotated[1]) v = cplx(-v.imag(), v.real());
    CHECK(sinr(1, bf, eff, unit_noise()) == sinr(1, bf, rotated, unit_noise()));
  }
  SUBCASE("more noise, lower SINR") {
    RandomStream rng(14);
    const Beamformer bf = random_beamformer(2, 2, rng);
    std::vector<CVector> eff(2, CVector(2));
    for (auto& e : eff) for (auto& v : e) v = rng.complex_normal();
    double prev = sinr(0, bf, eff, unit_noise(1e-3));
    for (double s2 : {1e-2, 1e-1, 1.0, 10.0}) {
      const double g = sinr(0, bf, eff, unit_noise(s2));
      CHECK(g < prev);
      prev = g;
    }
  }
}

TEST_CASE("Shannon rate") {
  CHECK(rate(0.0, 1e6) == 0.0);
  CHECK(rate(1.0, 1e6) == 1e6);
  CHECK(rate(3.0, 1e6) == 2e6);
}

TEST_CASE("sum rate") {
  RandomStream rng(21);
  SUBCASE("silent base station") {
    const auto ch = oracle::random_channels(2, 4, 3, rng);
    const auto e = oracle::random_elements(4, rng);
    const auto regions = oracle::random_regions(3, rng);
    CHECK(sum_rate(ch, regions, e, Beamformer{CMatrix(2, 3)}, unit_noise()) == 0.0);
  }
  SUBCASE("single user without RIS") {
    const auto ch = oracle::random_channels(3, 4, 1, rng);
    const Beamformer bf = random_beamformer(3, 1, rng);
    cplx s = 0;
    for (std::size_t m = 0; m < 3; ++m) s += ch.bs_users(m, 0) * bf.w(m, 0);
    const std::vector<Region> regions{Region::Reflection};
    const double want = 1e6 * std::log2(1 + std::norm(s) / 0.5);
    NoiseModel noise = unit_noise(0.5);
    CHECK(sum_rate(ch, regions, StarMatrices::disabled(4), bf, noise) == doctest::Approx(want).epsilon(1e-13));
  }
  SUBCASE("brute-force equivalence on small systems") {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t m = 1 + trial % 3, n = 1 + (trial / 3) % 4, k = 1 + (trial / 12) % 3;
      const auto ch = oracle::random_channels(m, n, k, rng);
      const auto e = oracle::random_elements(n, rng);
      const auto regions = oracle::random_regions(k, rng);
      const Beamformer bf = random_beamformer(m, k, rng);
      const NoiseModel noise = unit_noise(rng.uniform(0.05, 2.0));
      const double got = sum_rate(ch, regions, e, bf, noise);
      const double want = oracle::naive_sum_rate(ch, regions, e, bf.w, noise.sigma2, noise.bandwidth_hz);
      CHECK(got >= 0.0);
      CHECK(std::abs(got - want) <= 1e-9 * std::max(std::abs(want), 1e-300));
    }
  }
}
