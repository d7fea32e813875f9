#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stardeploy/env.hpp"
#include "stardeploy/nn.hpp"
#include "stardeploy/random.hpp"

namespace stardeploy::ppo {

struct PpoHyper {
  std::size_t batch_size = 8192;     // environment steps per update
  std::size_t minibatch_size = 256;
  std::size_t epochs = 10;           // passes over each batch
  std::size_t total_steps = 1'000'000;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  double actor_lr = 3e-4;            // decays linearly to zero over training
  double critic_lr = 3e-4;           // constant
  bool anneal_actor_lr = true;
  bool normalize_advantages = true;  // per minibatch
  double entropy_coef = 0.0;
  double initial_log_std = 0.0;
  double reward_scale = 1e-3;        // rewards (bits/s) are multiplied by this before GAE
  std::size_t hidden_units = 64;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  std::size_t num_batches() const { return total_steps / batch_size; }
  void validate() const;
};

/// Diagonal Gaussian policy with a tanh-bounded mean network and a learned,
/// state-independent log standard deviation.
struct GaussianPolicy {
  nn::Mlp mean;
  std::vector<double> log_std;

  std::size_t action_size() const { return log_std.size(); }
  // Mean-network parameters followed by log_std.
  std::size_t parameter_count() const { return mean.params().size() + log_std.size(); }

  friend bool operator==(const GaussianPolicy&, const GaussianPolicy&) = default;
};

GaussianPolicy make_policy(std::size_t obs_size, std::size_t action_size, const PpoHyper& hyper,
                           RandomStream& rng);
nn::Mlp make_critic(std::size_t obs_size, const PpoHyper& hyper, RandomStream& rng);

// Diagonal Gaussian log-density of `action` given the mean and log std.
double gaussian_log_prob(std::span<const double> mean, std::span<const double> log_std,
                         std::span<const double> action);

struct ActionSample {
  std::vector<double> raw;      // pre-clamp Gaussian sample; used for ratios
  std::vector<double> clamped;  // sent to the environment
  double log_prob = 0.0;        // of `raw`
};

ActionSample sample_action(const GaussianPolicy& pol, std::span<const double> obs, RandomStream& rng);
std::vector<double> mean_action(const GaussianPolicy& pol, std::span<const double> obs);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// `values` carries one extra bootstrap entry V(s_n). A done flag at t stops
// the recursion and the bootstrap across the episode boundary.
GaeResult gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const bool> dones, double gamma, double lambda);

// Clip function: (1+eps) A for A >= 0, (1-eps) A otherwise.
double clip_objective(double eps, double advantage);

// -mean(min(ratio * A, g(eps, A))) with ratio = exp(logp_new - logp_old).
double clipped_loss(std::span<const double> logp_new, std::span<const double> logp_old,
                    std::span<const double> adv, double eps);

double value_loss(std::span<const double> v_pred, std::span<const double> returns);

// A minibatch as views into stored rollout data. `observations` and
// `actions` are row-major (count x obs_size / count x action_size).
struct MinibatchView {
  std::span<const double> observations;
  std::span<const double> actions;
  std::span<const double> old_log_probs;
  std::span<const double> advantages;
  std::span<const double> returns;
  std::size_t count = 0;
};

struct ActorLoss {
  double loss = 0.0;
  double clip_fraction = 0.0;
  std::vector<double> ratios;
  std::vector<double> grad;  // layout as GaussianPolicy::parameter_count()
};

ActorLoss actor_loss(const GaussianPolicy& pol, const MinibatchView& mb, const PpoHyper& hyper);

struct CriticLoss {
  double loss = 0.0;
  std::vector<double> grad;
};

CriticLoss critic_loss(const nn::Mlp& critic, const MinibatchView& mb);

struct BatchMetrics {
  std::size_t batch = 0;
  std::size_t env_steps = 0;  // cumulative
  double mean_episode_reward = 0.0;  // mean undiscounted return of episodes finished in the batch
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double clip_fraction = 0.0;
  double mean_std = 0.0;
  std::size_t episodes = 0;
  double actor_lr = 0.0;

  friend bool operator==(const BatchMetrics&, const BatchMetrics&) = default;
};

using EnvFactory = std::function<Environment()>;

/// Rollout collection plus clipped-surrogate updates, one batch at a time.
class Trainer {
 public:
  Trainer(EnvFactory factory, PpoHyper hyper, std::uint64_t seed);

  BatchMetrics run_batch();
  bool finished() const { return batch_ >= hyper_.num_batches(); }

  const PpoHyper& hyper() const { return hyper_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t batches_done() const { return batch_; }
  const GaussianPolicy& policy() const { return policy_; }
  const nn::Mlp& critic() const { return critic_; }
  const nn::AdamState& actor_adam() const { return actor_adam_; }
  const nn::AdamState& critic_adam() const { return critic_adam_; }
  const RandomStream& rng() const { return rng_; }
  const Environment& env() const { return env_; }

  // Importance ratios of the first minibatch of the most recent update,
  // evaluated before any parameter change.
  const std::vector<double>& first_minibatch_ratios() const { return first_ratios_; }

 private:
  void begin_episode();

  PpoHyper hyper_;
  std::uint64_t seed_;
  Environment env_;
  RandomStream rng_;
  GaussianPolicy policy_;
  nn::Mlp critic_;
  nn::AdamState actor_adam_;
  nn::AdamState critic_adam_;
  std::size_t batch_ = 0;
  std::size_t env_steps_ = 0;
  std::uint64_t episode_index_ = 0;
  Observation obs_;
  double episode_return_ = 0.0;
  std::vector<double> first_ratios_;
};

struct TrainResult {
  GaussianPolicy policy;
  nn::Mlp critic;
  std::vector<BatchMetrics> metrics;
};

using BatchCallback = std::function<void(const Trainer&, const BatchMetrics&)>;

TrainResult train(EnvFactory factory, const PpoHyper& hyper, std::uint64_t seed,
                  const BatchCallback& on_batch = {});

// Seed of the environment episode `index` for run `seed`; shared by every
// scheme so comparisons are paired.
std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace stardeploy::ppo
