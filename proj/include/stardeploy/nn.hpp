#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stardeploy/random.hpp"

namespace stardeploy::nn {

struct MlpShape {
  std::size_t inputs = 0;
  std::size_t hidden = 64;
  std::size_t outputs = 0;
  bool tanh_output = false;  // true for the actor mean head

  std::size_t parameter_count() const { return inputs * hidden + hidden + hidden * outputs + outputs; }
  friend bool operator==(const MlpShape&, const MlpShape&) = default;
};

/// One-hidden-layer tanh network: y = act(tanh(x W1 + b1) W2 + b2).
///
/// All parameters live in one flat vector in the order W1 (inputs x hidden,
/// row-major), b1, W2 (hidden x outputs, row-major), b2, so optimizers and
/// checkpoints can treat them as a single array.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(MlpShape shape);

  const MlpShape& shape() const { return shape_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  std::span<const double> w1() const { return {params_.data(), shape_.inputs * shape_.hidden}; }
  std::span<const double> b1() const { return {params_.data() + b1_offset(), shape_.hidden}; }
  std::span<const double> w2() const { return {params_.data() + w2_offset(), shape_.hidden * shape_.outputs}; }
  std::span<const double> b2() const { return {params_.data() + b2_offset(), shape_.outputs}; }

  // Activations kept from a forward pass for the matching backward pass.
  struct Cache {
    std::vector<double> input;
    std::vector<double> hidden;  // post-tanh
    std::vector<double> output;  // post-activation
  };

  std::vector<double> forward(std::span<const double> x) const;
  void forward(std::span<const double> x, Cache& cache) const;

  // Adds d(upstream . y)/d(params) into `grad` (length parameter_count()).
  void backward(const Cache& cache, std::span<const double> upstream, std::span<double> grad) const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::size_t b1_offset() const { return shape_.inputs * shape_.hidden; }
  std::size_t w2_offset() const { return b1_offset() + shape_.hidden; }
  std::size_t b2_offset() const { return w2_offset() + shape_.hidden * shape_.outputs; }

  MlpShape shape_;
  std::vector<double> params_;
};

// Fan-in scaled uniform init: weights ~ U(-g*sqrt(3/fan_in), g*sqrt(3/fan_in)),
// biases zero. Hidden layer uses `hidden_gain`, output layer `output_gain`.
void init_mlp(Mlp& net, RandomStream& rng, double hidden_gain, double output_gain);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_size(std::size_t n) { return {std::vector<double>(n), std::vector<double>(n)}; }
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// Bias-corrected Adam step, in place.
void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state, double lr);

}  // namespace stardeploy::nn
