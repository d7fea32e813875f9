#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>

namespace stardeploy {

/// Seeded random source owned by one environment or trainer.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; uniform and Gaussian draws are derived here rather than through
/// the std distributions so streams are reproducible across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  void reseed(std::uint64_t seed) { engine_.seed(seed); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();

  // Circularly-symmetric complex Gaussian with unit variance, CN(0, 1).
  std::complex<double> complex_normal();

  std::string save_state() const;
  void load_state(const std::string& state);

  friend bool operator==(const RandomStream& a, const RandomStream& b) {
    return a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer over (base, stream); used to derive independent
// per-episode and per-component seeds from one run seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace stardeploy
