#include "stardeploy/nn.hpp"

#include <cmath>

#include "stardeploy/error.hpp"
#include "stardeploy/kernels.hpp"

namespace stardeploy::nn {

Mlp::Mlp(MlpShape shape) : shape_(shape), params_(shape.parameter_count(), 0.0) {
  if (shape.inputs == 0 || shape.hidden == 0 || shape.outputs == 0) {
    throw ConfigError("mlp: every layer needs at least one unit");
  }
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  Cache cache;
  forward(x, cache);
  return std::move(cache.output);
}

void Mlp::forward(std::span<const double> x, Cache& cache) const {
  if (x.size() != shape_.inputs) throw_dimension("mlp forward: input length", shape_.inputs, x.size());
  const std::size_t h = shape_.hidden;
  const std::size_t o = shape_.outputs;
  const auto w1v = w1();
  const auto w2v = w2();

  cache.input.assign(x.begin(), x.end());
  cache.hidden.assign(b1().begin(), b1().end());
  for (std::size_t i = 0; i < shape_.inputs; ++i) {
    if (x[i] == 0.0) continue;
    kernels::axpy(x[i], w1v.subspan(i * h, h), cache.hidden);
  }
  for (double& v : cache.hidden) v = std::tanh(v);

  cache.output.assign(b2().begin(), b2().end());
  for (std::size_t j = 0; j < h; ++j) kernels::axpy(cache.hidden[j], w2v.subspan(j * o, o), cache.output);
  if (shape_.tanh_output) {
    for (double& v : cache.output) v = std::tanh(v);
  }
}

void Mlp::backward(const Cache& cache, std::span<const double> upstream, std::span<double> grad) const {
  const std::size_t h = shape_.hidden;
  const std::size_t o = shape_.outputs;
  if (upstream.size() != o) throw_dimension("mlp backward: upstream length", o, upstream.size());
  if (grad.size() != params_.size()) throw_dimension("mlp backward: gradient length", params_.size(), grad.size());

  std::vector<double> d_out(upstream.begin(), upstream.end());
  if (shape_.tanh_output) {
    for (std::size_t k = 0; k < o; ++k) d_out[k] *= 1.0 - cache.output[k] * cache.output[k];
  }

  auto g_w1 = grad.subspan(0, shape_.inputs * h);
  auto g_b1 = grad.subspan(b1_offset(), h);
  auto g_w2 = grad.subspan(w2_offset(), h * o);
  auto g_b2 = grad.subspan(b2_offset(), o);
  const auto w2v = w2();

  for (std::size_t k = 0; k < o; ++k) g_b2[k] += d_out[k];

  std::vector<double> d_hidden(h);
  for (std::size_t j = 0; j < h; ++j) {
    kernels::axpy(cache.hidden[j], d_out, g_w2.subspan(j * o, o));
    const double back = kernels::dot(w2v.subspan(j * o, o), d_out);
    d_hidden[j] = back * (1.0 - cache.hidden[j] * cache.hidden[j]);
  }

  for (std::size_t j = 0; j < h; ++j) g_b1[j] += d_hidden[j];
  for (std::size_t i = 0; i < shape_.inputs; ++i) {
    const double xi = cache.input[i];
    if (xi == 0.0) continue;
    kernels::axpy(xi, d_hidden, g_w1.subspan(i * h, h));
  }
}

void init_mlp(Mlp& net, RandomStream& rng, double hidden_gain, double output_gain) {
  const MlpShape& s = net.shape();
  auto p = net.params();
  std::size_t pos = 0;
  const double lim1 = hidden_gain * std::sqrt(3.0 / static_cast<double>(s.inputs));
  for (std::size_t i = 0; i < s.inputs * s.hidden; ++i) p[pos++] = rng.uniform(-lim1, lim1);
  for (std::size_t i = 0; i < s.hidden; ++i) p[pos++] = 0.0;
  const double lim2 = output_gain * std::sqrt(3.0 / static_cast<double>(s.hidden));
  for (std::size_t i = 0; i < s.hidden * s.outputs; ++i) p[pos++] = rng.uniform(-lim2, lim2);
  for (std::size_t i = 0; i < s.outputs; ++i) p[pos++] = 0.0;
}

void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state, double lr) {
  if (grads.size() != params.size()) throw_dimension("adam: gradient length", params.size(), grads.size());
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw_dimension("adam: moment length", params.size(), state.m.size());
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

}  // namespace stardeploy::nn
