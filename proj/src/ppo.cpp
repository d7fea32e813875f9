#include "stardeploy/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>
#include <utility>

#include "stardeploy/error.hpp"

namespace stardeploy::ppo {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// Stream ids for derive_seed.
constexpr std::uint64_t kTrainerStream = 0x7261696e;
constexpr std::uint64_t kEpisodeStream = 0x65706973;

void shuffle(std::vector<std::size_t>& idx, RandomStream& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(idx[i - 1], idx[std::min(j, i - 1)]);
  }
}

// Adam over the concatenation (mean-network params, log_std).
void adam_policy_step(GaussianPolicy& pol, std::span<const double> grad, nn::AdamState& state,
                      double lr) {
  auto mean_params = pol.mean.params();
  std::vector<double> flat;
  flat.reserve(pol.parameter_count());
  flat.insert(flat.end(), mean_params.begin(), mean_params.end());
  flat.insert(flat.end(), pol.log_std.begin(), pol.log_std.end());
  nn::adam_update(flat, grad, state, lr);
  std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(mean_params.size()), mean_params.begin());
  std::copy(flat.begin() + static_cast<std::ptrdiff_t>(mean_params.size()), flat.end(), pol.log_std.begin());
}

}  // namespace

void PpoHyper::validate() const {
  if (batch_size == 0 || minibatch_size == 0) throw ConfigError("ppo: batch sizes must be >= 1");
  if (batch_size % minibatch_size != 0) throw ConfigError("ppo: minibatch size must divide batch size");
  if (epochs == 0) throw ConfigError("ppo: epochs must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("ppo: gamma must be in (0, 1]");
  if (!(gae_lambda > 0.0 && gae_lambda <= 1.0)) throw ConfigError("ppo: lambda must be in (0, 1]");
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) throw ConfigError("ppo: clip epsilon must be in (0, 1)");
  if (!(actor_lr >= 0.0) || !(critic_lr >= 0.0)) throw ConfigError("ppo: learning rates must be >= 0");
  if (!(reward_scale > 0.0)) throw ConfigError("ppo: reward scale must be > 0");
  if (hidden_units == 0) throw ConfigError("ppo: hidden units must be >= 1");
}

GaussianPolicy make_policy(std::size_t obs_size, std::size_t action_size, const PpoHyper& hyper,
                           RandomStream& rng) {
  GaussianPolicy pol;
  pol.mean = nn::Mlp({obs_size, hyper.hidden_units, action_size, true});
  nn::init_mlp(pol.mean, rng, std::numbers::sqrt2, 0.01);
  pol.log_std.assign(action_size, hyper.initial_log_std);
  return pol;
}

nn::Mlp make_critic(std::size_t obs_size, const PpoHyper& hyper, RandomStream& rng) {
  nn::Mlp critic({obs_size, hyper.hidden_units, 1, false});
  nn::init_mlp(critic, rng, std::numbers::sqrt2, 1.0);
  return critic;
}

double gaussian_log_prob(std::span<const double> mean, std::span<const double> log_std,
                         std::span<const double> action) {
  double lp = 0.0;
  for (std::size_t d = 0; d < mean.size(); ++d) {
    const double z = (action[d] - mean[d]) / std::exp(log_std[d]);
    lp += -0.5 * z * z - log_std[d] - kHalfLog2Pi;
  }
  return lp;
}

ActionSample sample_action(const GaussianPolicy& pol, std::span<const double> obs, RandomStream& rng) {
  const std::vector<double> mu = pol.mean.forward(obs);
  ActionSample s;
  s.raw.resize(mu.size());
  s.clamped.resize(mu.size());
  for (std::size_t d = 0; d < mu.size(); ++d) {
    s.raw[d] = mu[d] + std::exp(pol.log_std[d]) * rng.normal();
    s.clamped[d] = std::clamp(s.raw[d], -1.0, 1.0);
  }
  s.log_prob = gaussian_log_prob(mu, pol.log_std, s.raw);
  return s;
}

std::vector<double> mean_action(const GaussianPolicy& pol, std::span<const double> obs) {
  return pol.mean.forward(obs);
}

GaeResult gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const bool> dones, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n + 1) throw_dimension("gae: values (with bootstrap)", n + 1, values.size());
  if (dones.size() != n) throw_dimension("gae: done flags", n, dones.size());

  GaeResult out{std::vector<double>(n), std::vector<double>(n)};
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double live = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * values[i + 1] * live - values[i];
    running = delta + gamma * lambda * live * running;
    out.advantages[i] = running;
    out.returns[i] = running + values[i];
  }
  return out;
}

double clip_objective(double eps, double advantage) {
  return advantage >= 0.0 ? (1.0 + eps) * advantage : (1.0 - eps) * advantage;
}

double clipped_loss(std::span<const double> logp_new, std::span<const double> logp_old,
                    std::span<const double> adv, double eps) {
  if (logp_old.size() != logp_new.size() || adv.size() != logp_new.size()) {
    throw DimensionError("clipped_loss: input lengths differ");
  }
  if (logp_new.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < logp_new.size(); ++i) {
    const double ratio = std::exp(logp_new[i] - logp_old[i]);
    acc += std::min(ratio * adv[i], clip_objective(eps, adv[i]));
  }
  return -acc / static_cast<double>(logp_new.size());
}

double value_loss(std::span<const double> v_pred, std::span<const double> returns) {
  if (v_pred.size() != returns.size()) throw DimensionError("value_loss: input lengths differ");
  if (v_pred.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < v_pred.size(); ++i) {
    const double e = v_pred[i] - returns[i];
    acc += e * e;
  }
  return acc / static_cast<double>(v_pred.size());
}

ActorLoss actor_loss(const GaussianPolicy& pol, const MinibatchView& mb, const PpoHyper& hyper) {
  const std::size_t n = mb.count;
  const std::size_t obs_dim = pol.mean.shape().inputs;
  const std::size_t act_dim = pol.action_size();
  const std::size_t mean_params = pol.mean.params().size();

  std::vector<double> adv(mb.advantages.begin(), mb.advantages.begin() + static_cast<std::ptrdiff_t>(n));
  if (hyper.normalize_advantages && n > 1) {
    const double mu = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double a : adv) var += (a - mu) * (a - mu);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (double& a : adv) a = (a - mu) / (sd + 1e-8);
  }

  std::vector<double> inv_var(act_dim);
  for (std::size_t d = 0; d < act_dim; ++d) inv_var[d] = std::exp(-2.0 * pol.log_std[d]);

  ActorLoss out;
  out.grad.assign(pol.parameter_count(), 0.0);
  out.ratios.resize(n);
  auto grad_mean = std::span<double>(out.grad).subspan(0, mean_params);
  auto grad_log_std = std::span<double>(out.grad).subspan(mean_params, act_dim);

  nn::Mlp::Cache cache;
  std::vector<double> upstream(act_dim);
  std::size_t clipped = 0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto obs = mb.observations.subspan(i * obs_dim, obs_dim);
    const auto act = mb.actions.subspan(i * act_dim, act_dim);
    pol.mean.forward(obs, cache);
    const double logp = gaussian_log_prob(cache.output, pol.log_std, act);
    const double ratio = std::exp(logp - mb.old_log_probs[i]);
    out.ratios[i] = ratio;
    if (std::abs(ratio - 1.0) > hyper.clip_epsilon) ++clipped;

    const double surrogate = ratio * adv[i];
    const double bound = clip_objective(hyper.clip_epsilon, adv[i]);
    out.loss -= std::min(surrogate, bound) * inv_n;
    if (surrogate > bound) continue;  // clipped branch is constant in the parameters

    // d loss / d logp for this sample.
    const double coeff = -surrogate * inv_n;
    for (std::size_t d = 0; d < act_dim; ++d) {
      const double diff = act[d] - cache.output[d];
      upstream[d] = coeff * diff * inv_var[d];
      grad_log_std[d] += coeff * (diff * diff * inv_var[d] - 1.0);
    }
    pol.mean.backward(cache, upstream, grad_mean);
  }

  if (hyper.entropy_coef != 0.0) {
    double entropy = 0.0;
    for (std::size_t d = 0; d < act_dim; ++d) {
      entropy += pol.log_std[d] + 0.5 + kHalfLog2Pi;
      grad_log_std[d] -= hyper.entropy_coef;
    }
    out.loss -= hyper.entropy_coef * entropy;
  }
  out.clip_fraction = static_cast<double>(clipped) * inv_n;
  return out;
}

CriticLoss critic_loss(const nn::Mlp& critic, const MinibatchView& mb) {
  const std::size_t n = mb.count;
  const std::size_t obs_dim = critic.shape().inputs;
  CriticLoss out;
  out.grad.assign(critic.params().size(), 0.0);
  nn::Mlp::Cache cache;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    critic.forward(mb.observations.subspan(i * obs_dim, obs_dim), cache);
    const double err = cache.output[0] - mb.returns[i];
    out.loss += err * err * inv_n;
    const double up = 2.0 * err * inv_n;
    critic.backward(cache, std::span<const double>(&up, 1), out.grad);
  }
  return out;
}

std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t index) {
  return derive_seed(derive_seed(seed, kEpisodeStream), index);
}

Trainer::Trainer(EnvFactory factory, PpoHyper hyper, std::uint64_t seed)
    : hyper_(std::move(hyper)), seed_(seed), env_(factory()), rng_(derive_seed(seed, kTrainerStream)) {
  hyper_.validate();
  const std::size_t obs_dim = env_.config().observation_size();
  const std::size_t act_dim = env_.config().action_size();
  policy_ = make_policy(obs_dim, act_dim, hyper_, rng_);
  critic_ = make_critic(obs_dim, hyper_, rng_);
  actor_adam_ = nn::AdamState::for_size(policy_.parameter_count());
  critic_adam_ = nn::AdamState::for_size(critic_.params().size());
  for (nn::AdamState* s : {&actor_adam_, &critic_adam_}) {
    s->beta1 = hyper_.adam_beta1;
    s->beta2 = hyper_.adam_beta2;
    s->eps = hyper_.adam_eps;
  }
  begin_episode();
}

void Trainer::begin_episode() {
  obs_ = env_.reset(episode_seed(seed_, episode_index_++));
  episode_return_ = 0.0;
}

BatchMetrics Trainer::run_batch() {
  const std::size_t n = hyper_.batch_size;
  const std::size_t obs_dim = env_.config().observation_size();
  const std::size_t act_dim = env_.config().action_size();

  std::vector<double> observations(n * obs_dim);
  std::vector<double> actions(n * act_dim);
  std::vector<double> old_log_probs(n);
  std::vector<double> rewards(n);
  std::vector<double> values(n + 1);
  std::vector<bool> done_flags(n);
  std::vector<double> finished_returns;

  for (std::size_t i = 0; i < n; ++i) {
    std::copy(obs_.begin(), obs_.end(), observations.begin() + static_cast<std::ptrdiff_t>(i * obs_dim));
    ActionSample s = sample_action(policy_, obs_, rng_);
    values[i] = critic_.forward(obs_)[0];
    StepResult res = env_.step(s.clamped);

    std::copy(s.raw.begin(), s.raw.end(), actions.begin() + static_cast<std::ptrdiff_t>(i * act_dim));
    old_log_probs[i] = s.log_prob;
    rewards[i] = hyper_.reward_scale * res.reward;
    done_flags[i] = res.done;
    episode_return_ += res.reward;
    if (res.done) {
      finished_returns.push_back(episode_return_);
      begin_episode();
    } else {
      obs_ = std::move(res.observation);
    }
  }
  values[n] = critic_.forward(obs_)[0];
  env_steps_ += n;

  std::unique_ptr<bool[]> dones(new bool[n]);
  for (std::size_t i = 0; i < n; ++i) dones[i] = done_flags[i];
  const GaeResult est = gae(rewards, values, std::span<const bool>(dones.get(), n), hyper_.gamma,
                            hyper_.gae_lambda);

  const double frac = hyper_.anneal_actor_lr && hyper_.num_batches() > 0
                          ? 1.0 - static_cast<double>(batch_) / static_cast<double>(hyper_.num_batches())
                          : 1.0;
  const double lr_actor = hyper_.actor_lr * frac;

  const std::size_t mb_size = hyper_.minibatch_size;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> mb_obs(mb_size * obs_dim), mb_act(mb_size * act_dim);
  std::vector<double> mb_logp(mb_size), mb_adv(mb_size), mb_ret(mb_size);

  double actor_loss_sum = 0.0, critic_loss_sum = 0.0, clip_sum = 0.0;
  std::size_t updates = 0;
  for (std::size_t epoch = 0; epoch < hyper_.epochs; ++epoch) {
    shuffle(order, rng_);
    for (std::size_t start = 0; start < n; start += mb_size) {
      for (std::size_t j = 0; j < mb_size; ++j) {
        const std::size_t src = order[start + j];
        std::copy_n(observations.begin() + static_cast<std::ptrdiff_t>(src * obs_dim), obs_dim,
                    mb_obs.begin() + static_cast<std::ptrdiff_t>(j * obs_dim));
        std::copy_n(actions.begin() + static_cast<std::ptrdiff_t>(src * act_dim), act_dim,
                    mb_act.begin() + static_cast<std::ptrdiff_t>(j * act_dim));
        mb_logp[j] = old_log_probs[src];
        mb_adv[j] = est.advantages[src];
        mb_ret[j] = est.returns[src];
      }
      const MinibatchView mb{mb_obs, mb_act, mb_logp, mb_adv, mb_ret, mb_size};
      ActorLoss a = actor_loss(policy_, mb, hyper_);
      CriticLoss c = critic_loss(critic_, mb);
      if (epoch == 0 && start == 0) first_ratios_ = a.ratios;

      if (!std::isfinite(a.loss) || !std::isfinite(c.loss)) {
        std::ostringstream os;
        os << "non-finite loss: seed=" << seed_ << " batch=" << batch_ << " epoch=" << epoch
           << " minibatch=" << start / mb_size << " actor_loss=" << a.loss << " critic_loss=" << c.loss
           << " env_steps=" << env_steps_;
        throw TrainingDiverged(os.str());
      }

      adam_policy_step(policy_, a.grad, actor_adam_, lr_actor);
      nn::adam_update(critic_.params(), c.grad, critic_adam_, hyper_.critic_lr);

      actor_loss_sum += a.loss;
      critic_loss_sum += c.loss;
      clip_sum += a.clip_fraction;
      ++updates;
    }
  }

  BatchMetrics m;
  m.batch = batch_;
  m.env_steps = env_steps_;
  m.episodes = finished_returns.size();
  m.mean_episode_reward =
      finished_returns.empty()
          ? 0.0
          : std::accumulate(finished_returns.begin(), finished_returns.end(), 0.0) /
                static_cast<double>(finished_returns.size());
  const double inv_updates = updates ? 1.0 / static_cast<double>(updates) : 0.0;
  m.actor_loss = actor_loss_sum * inv_updates;
  m.critic_loss = critic_loss_sum * inv_updates;
  m.clip_fraction = clip_sum * inv_updates;
  double std_sum = 0.0;
  for (double ls : policy_.log_std) std_sum += std::exp(ls);
  m.mean_std = std_sum / static_cast<double>(policy_.log_std.size());
  m.actor_lr = lr_actor;
  ++batch_;
  return m;
}

TrainResult train(EnvFactory factory, const PpoHyper& hyper, std::uint64_t seed,
                  const BatchCallback& on_batch) {
  Trainer trainer(std::move(factory), hyper, seed);
  TrainResult out;
  while (!trainer.finished()) {
    out.metrics.push_back(trainer.run_batch());
    if (on_batch) on_batch(trainer, out.metrics.back());
  }
  out.policy = trainer.policy();
  out.critic = trainer.critic();
  return out;
}

}  // namespace stardeploy::ppo
