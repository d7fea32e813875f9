#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "stardeploy/ppo.hpp"

using namespace stardeploy;
using namespace stardeploy::ppo;

namespace {

EnvConfig tiny_env() {
  EnvConfig cfg;
  cfg.antennas = 2;
  cfg.elements = 4;
  cfg.users = 2;
  cfg.episode_length = 8;
  return cfg;
}

PpoHyper tiny_hyper() {
  PpoHyper h;
  h.batch_size = 64;
  h.minibatch_size = 16;
  h.epochs = 3;
  h.total_steps = 192;
  h.hidden_units = 8;
  return h;
}

EnvFactory factory(EnvConfig cfg) {
  return [cfg] { return Environment(cfg); };
}

// Bool spans need contiguous storage; std::vector<bool> is bit-packed.
struct Flags {
  std::unique_ptr<bool[]> data;
  std::size_t n;
  std::span<const bool> span() const { return {data.get(), n}; }
};

Flags flags(std::size_t n, RandomStream& rng, double p_done) {
  Flags f{std::make_unique<bool[]>(n), n};
  for (std::size_t i = 0; i < n; ++i) f.data[i] = rng.uniform() < p_done;
  return f;
}

}  // namespace

TEST_CASE("GAE") {
  SUBCASE("single step") {
    const std::vector<double> r{1.0}, v{0.0, 0.0};
    const bool d[] = {false};
    const auto g = gae(r, v, d, 0.99, 0.95);
    CHECK(g.advantages[0] == 1.0);
    CHECK(g.returns[0] == 1.0);
  }
  SUBCASE("zeros in, zeros out") {
    const std::vector<double> r(10, 0.0), v(11, 0.0);
    RandomStream rng(1);
    const auto d = flags(10, rng, 0.3);
    for (double a : gae(r, v, d.span(), 0.9, 0.95).advantages) CHECK(a == 0.0);
  }
  SUBCASE("lambda = 1 equals the discounted Monte-Carlo form") {
    RandomStream rng(2);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 60);
      std::vector<double> r(n), v(n + 1);
      for (double& x : r) x = rng.normal();
      for (double& x : v) x = rng.normal();
      const auto d = flags(n, rng, trial % 2 ? 0.1 : 0.0);
      const double gamma = rng.uniform(0.5, 1.0);
      const auto got = gae(r, v, d.span(), gamma, 1.0);
      const auto want = oracle::monte_carlo_advantages(r, v, d.span(), gamma);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(got.advantages[i] - want[i]) < 1e-10);
        CHECK(got.returns[i] == doctest::Approx(got.advantages[i] + v[i]));
      }
    }
  }
}

TEST_CASE("clipped surrogate") {
  CHECK(clip_objective(0.2, 2.0) == 2.4);
  CHECK(clip_objective(0.2, -1.0) == -0.8);

  const std::vector<double> lp{0.1, -0.4, 0.7}, adv{1.0, -2.0, 0.5};
  CHECK(clipped_loss(lp, lp, adv, 0.2) == doctest::Approx(-(1.0 - 2.0 + 0.5) / 3.0));

  // ratio 2, A = 2 -> min(4, 2.4)
  CHECK(clipped_loss(std::vector<double>{std::log(2.0)}, std::vector<double>{0.0}, std::vector<double>{2.0}, 0.2) ==
        doctest::Approx(-2.4));
  // ratio 0.5, A = -1 -> min(-0.5, -0.8) = -0.8, so the loss is +0.8
  CHECK(clipped_loss(std::vector<double>{std::log(0.5)}, std::vector<double>{0.0}, std::vector<double>{-1.0}, 0.2) ==
        doctest::Approx(0.8));

  RandomStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double ratio = std::exp(rng.normal()), a = rng.normal();
    CHECK(std::min(ratio * a, clip_objective(0.2, a)) <= ratio * a);
  }
}

TEST_CASE("value loss") {
  CHECK(value_loss(std::vector<double>{1, 2}, std::vector<double>{1, 2}) == 0.0);
  CHECK(value_loss(std::vector<double>{2, 3}, std::vector<double>{1, 2}) == 1.0);
  CHECK(value_loss(std::vector<double>{0, 2}, std::vector<double>{1, 1}) == 1.0);
}

TEST_CASE("Gaussian policy") {
  RandomStream rng(4);
  PpoHyper h;
  h.hidden_units = 8;
  GaussianPolicy pol = make_policy(5, 3, h, rng);
  const std::vector<double> obs{0.3, -1, 2, 0.1, 0.5};
  const auto mu = mean_action(pol, obs);

  const double expect = -(0.5 * std::log(2 * std::numbers::pi)) * 3 - (pol.log_std[0] + pol.log_std[1] + pol.log_std[2]);
  CHECK(gaussian_log_prob(mu, pol.log_std, mu) == doctest::Approx(expect));

  SUBCASE("vanishing spread returns the mean") {
    pol.log_std.assign(3, -80.0);
    const auto s = sample_action(pol, obs, rng);
    for (std::size_t d = 0; d < 3; ++d) CHECK(s.raw[d] == mu[d]);
  }
  SUBCASE("sample mean matches the clamped-Gaussian mean") {
    pol.log_std.assign(3, std::log(0.5));
    const int n = 10000;
    std::vector<double> sum(3, 0.0), sq(3, 0.0);
    for (int i = 0; i < n; ++i) {
      const auto s = sample_action(pol, obs, rng);
      for (std::size_t d = 0; d < 3; ++d) {
        CHECK(std::abs(s.clamped[d]) <= 1.0);
        sum[d] += s.clamped[d];
        sq[d] += s.clamped[d] * s.clamped[d];
      }
    }
    // E[clamp(X, -1, 1)] for X ~ N(mu, sigma^2), by numerical quadrature.
    for (std::size_t d = 0; d < 3; ++d) {
      const double sigma = 0.5;
      double e = 0.0;
      const int steps = 20000;
      const double lo = mu[d] - 10 * sigma, hi = mu[d] + 10 * sigma, dx = (hi - lo) / steps;
      for (int j = 0; j < steps; ++j) {
        const double x = lo + (j + 0.5) * dx;
        const double pdf = std::exp(-0.5 * std::pow((x - mu[d]) / sigma, 2)) / (sigma * std::sqrt(2 * std::numbers::pi));
        e += std::clamp(x, -1.0, 1.0) * pdf * dx;
      }
      const double m = sum[d] / n;
      const double se = std::sqrt((sq[d] / n - m * m) / n);
      CHECK(std::abs(m - e) < 3 * se);
    }
  }
}

TEST_CASE("actor and critic gradients on a toy problem") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto p = oracle::make_toy_actor_problem(seed);
    PpoHyper h;
    const auto mb = p.view();
    const ActorLoss a = actor_loss(p.policy, mb, h);

    std::vector<double> flat(p.policy.mean.params().begin(), p.policy.mean.params().end());
    flat.insert(flat.end(), p.policy.log_std.begin(), p.policy.log_std.end());
    auto objective = [&] {
      GaussianPolicy q = p.policy;
      std::copy(flat.begin(), flat.begin() + q.mean.params().size(), q.mean.params().begin());
      std::copy(flat.begin() + q.mean.params().size(), flat.end(), q.log_std.begin());
      return actor_loss(q, mb, h).loss;
    };
    const auto fd = oracle::central_difference(objective, flat, 1e-6);
    CHECK(oracle::max_relative_error(a.grad, fd, 1e-7) < 1e-4);

    const CriticLoss c = critic_loss(p.critic, mb);
    auto cobj = [&] { return critic_loss(p.critic, mb).loss; };
    const auto cfd = oracle::central_difference(cobj, p.critic.params(), 1e-6);
    CHECK(oracle::max_relative_error(c.grad, cfd, 1e-7) < 1e-4);
  }
}

TEST_CASE("training bookkeeping and determinism") {
  const EnvConfig env = tiny_env();
  const PpoHyper h = tiny_hyper();

  SUBCASE("one metrics record per batch, identical across runs") {
    const auto a = train(factory(env), h, 7);
    const auto b = train(factory(env), h, 7);
    CHECK(a.metrics.size() == h.total_steps / h.batch_size);
    CHECK(a.metrics == b.metrics);
    CHECK(a.policy == b.policy);
    CHECK(a.critic == b.critic);
    CHECK(a.metrics.back().env_steps == h.total_steps);
    const auto c = train(factory(env), h, 8);
    CHECK_FALSE(c.policy == a.policy);
  }

  SUBCASE("zero learning rates change nothing") {
    PpoHyper frozen = h;
    frozen.actor_lr = 0.0;
    frozen.critic_lr = 0.0;
    Trainer t(factory(env), frozen, 11);
    const GaussianPolicy p0 = t.policy();
    const nn::Mlp c0 = t.critic();
    while (!t.finished()) t.run_batch();
    CHECK(t.policy() == p0);
    CHECK(t.critic() == c0);
  }

  SUBCASE("first minibatch ratios are exactly one") {
    Trainer t(factory(env), h, 12);
    for (int b = 0; b < 2; ++b) {
      t.run_batch();
      REQUIRE(t.first_minibatch_ratios().size() == h.minibatch_size);
      for (double r : t.first_minibatch_ratios()) CHECK(std::abs(r - 1.0) < 1e-12);
    }
  }

  SUBCASE("actor rate decays linearly") {
    const auto run = train(factory(env), h, 13);
    for (std::size_t b = 0; b < run.metrics.size(); ++b) {
      CHECK(run.metrics[b].actor_lr ==
            doctest::Approx(h.actor_lr * (1.0 - double(b) / double(h.num_batches()))));
    }
  }
}

TEST_CASE("hyperparameter validation") {
  PpoHyper h;
  h.minibatch_size = 300;
  CHECK_THROWS(h.validate());
  h = PpoHyper{};
  h.clip_epsilon = 0.0;
  CHECK_THROWS(h.validate());
  CHECK_NOTHROW(PpoHyper{}.validate());
}
