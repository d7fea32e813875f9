#include "stardeploy/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stardeploy/error.hpp"

namespace stardeploy {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

double amplitude_from(double a) { return 0.5 * (clamp_unit(a) + 1.0); }

}  // namespace

std::size_t EnvConfig::observation_size() const {
  return 2 * (antennas * users + elements * antennas + elements * users) + users;
}

std::size_t EnvConfig::action_size() const { return 3 * elements + 2 * antennas * users + 3; }

void EnvConfig::validate() const {
  if (antennas == 0 || elements == 0 || users == 0) {
    throw ConfigError("env: antennas, elements and users must be >= 1");
  }
  if (episode_length == 0) throw ConfigError("env: episode length must be >= 1");
  if (!(x_max >= 0.0) || !(y_max >= 0.0)) throw ConfigError("env: movement bounds must be >= 0");
  if (!(state_scale > 0.0)) throw ConfigError("env: state scale must be > 0");
  if (bs.z < 0.0 || ris_initial.z < 0.0 || user_height < 0.0) {
    throw ConfigError("env: heights must be >= 0");
  }
  if (!(horizontal_distance(bs, ris_initial) > 0.0)) {
    throw ConfigError("env: BS and initial RIS position coincide horizontally");
  }
  channel.validate(elements);
  noise.validate();
  mobility.validate();
}

ActionLayout::ActionLayout(const EnvConfig& cfg) {
  const std::size_t n = cfg.elements;
  const std::size_t mk = cfg.antennas * cfg.users;
  theta_t = 0;
  beta = n;
  theta_r_sign = 2 * n;
  bs_phase = 3 * n;
  bs_amplitude = 3 * n + mk;
  x_move = 3 * n + 2 * mk;
  y_move = x_move + 1;
  orientation = x_move + 2;
  size = x_move + 3;
}

DecodedAction decode_action(std::span<const double> action, const EnvConfig& cfg) {
  const ActionLayout lay(cfg);
  if (action.size() != lay.size) throw_dimension("decode_action: action length", lay.size, action.size());

  const std::size_t n = cfg.elements;
  DecodedAction out;
  out.elements.beta.resize(n);
  out.elements.theta_t.resize(n);
  out.elements.theta_r.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta_t = wrap_phase(kPi * clamp_unit(action[lay.theta_t + i]));
    const double shift = clamp_unit(action[lay.theta_r_sign + i]) > 0.0 ? kPi / 2.0 : -kPi / 2.0;
    out.elements.theta_t[i] = theta_t;
    out.elements.theta_r[i] = wrap_phase(theta_t + shift);
    out.elements.beta[i] = amplitude_from(action[lay.beta + i]);
  }

  CMatrix w(cfg.antennas, cfg.users);
  for (std::size_t m = 0; m < cfg.antennas; ++m) {
    for (std::size_t k = 0; k < cfg.users; ++k) {
      const std::size_t j = m * cfg.users + k;
      w(m, k) = std::polar(amplitude_from(action[lay.bs_amplitude + j]),
                           kPi * clamp_unit(action[lay.bs_phase + j]));
    }
  }
  const double norm = std::sqrt(frobenius_norm2(w));
  const double limit = std::sqrt(cfg.noise.p_max);
  if (norm > limit) {
    const double scale = limit / norm;
    for (auto& v : w.data()) v *= scale;
  }
  out.beamformer.w = std::move(w);

  out.dx = cfg.x_max * clamp_unit(action[lay.x_move]);
  out.dy = cfg.y_max * clamp_unit(action[lay.y_move]);
  out.orientation = Orientation2D::from_angle(kPi * clamp_unit(action[lay.orientation]));
  return out;
}

void mask_action(std::span<double> action, const EnvConfig& cfg) {
  const ActionLayout lay(cfg);
  if (action.size() != lay.size) throw_dimension("mask_action: action length", lay.size, action.size());
  if (!cfg.ris_enabled) {
    std::fill(action.begin() + static_cast<std::ptrdiff_t>(lay.theta_t),
              action.begin() + static_cast<std::ptrdiff_t>(lay.bs_phase), 0.0);
  }
  if (!cfg.ris_enabled || !cfg.ris_movable) {
    action[lay.x_move] = 0.0;
    action[lay.y_move] = 0.0;
  }
  if (!cfg.ris_enabled || !cfg.ris_rotatable) action[lay.orientation] = 0.0;
}

Observation build_state(const ChannelRealization& ch, std::span<const Region> regions, double scale) {
  Observation obs;
  obs.reserve(2 * (ch.bs_users.size() + ch.bs_ris.size() + ch.ris_users.size()) + regions.size());
  for (const CMatrix* m : {&ch.bs_users, &ch.bs_ris, &ch.ris_users}) {
    for (const auto& v : m->data()) obs.push_back(scale * v.real());
    for (const auto& v : m->data()) obs.push_back(scale * v.imag());
  }
  for (Region r : regions) obs.push_back(r == Region::Reflection ? 1.0 : 0.0);
  return obs;
}

UnpackedState unflatten_state(std::span<const double> obs, std::size_t antennas,
                              std::size_t elements, std::size_t users, double scale) {
  const std::size_t expected = 2 * (antennas * users + elements * antennas + elements * users) + users;
  if (obs.size() != expected) throw_dimension("unflatten_state: observation length", expected, obs.size());

  UnpackedState out;
  out.channels.bs_users = CMatrix(antennas, users);
  out.channels.bs_ris = CMatrix(elements, antennas);
  out.channels.ris_users = CMatrix(elements, users);
  std::size_t pos = 0;
  for (CMatrix* m : {&out.channels.bs_users, &out.channels.bs_ris, &out.channels.ris_users}) {
    auto data = m->data();
    for (auto& v : data) v.real(obs[pos++] / scale);
    for (auto& v : data) v.imag(obs[pos++] / scale);
  }
  for (std::size_t k = 0; k < users; ++k) {
    out.regions.push_back(obs[pos++] > 0.5 ? Region::Reflection : Region::Transmission);
  }
  return out;
}

Environment::Environment(EnvConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  cfg_.mobility.center_x = cfg_.ris_initial.x;
  cfg_.mobility.center_y = cfg_.ris_initial.y;
  last_mats_ = StarMatrices::disabled(cfg_.elements);
  last_bf_.w = CMatrix(cfg_.antennas, cfg_.users);
}

void Environment::redraw() {
  channels_ = synth_channels(cfg_.channel, cfg_.antennas, cfg_.elements, cfg_.bs, ris_, users_, rng_);
  regions_ = classify_regions(users_, cfg_.bs, ris_, ori_);
}

Observation Environment::reset(std::uint64_t seed) {
  rng_.reseed(seed);
  ris_ = cfg_.ris_initial;
  ori_ = Orientation2D::from_angle(cfg_.initial_orientation);
  const double half = 0.5 * cfg_.mobility.square_side;
  users_.clear();
  for (std::size_t k = 0; k < cfg_.users; ++k) {
    const double x = rng_.uniform(cfg_.mobility.center_x - half, cfg_.mobility.center_x + half);
    const double y = rng_.uniform(cfg_.mobility.center_y - half, cfg_.mobility.center_y + half);
    users_.push_back({x, y, cfg_.user_height});
  }
  redraw();
  t_ = 0;
  started_ = true;
  done_ = false;
  return build_state(channels_, regions_, cfg_.state_scale);
}

StepResult Environment::step(std::span<const double> action) {
  if (!started_) throw LifecycleError("env: step called before reset");
  if (done_) throw LifecycleError("env: step called after the episode finished");

  ActionVector a(action.begin(), action.end());
  mask_action(a, cfg_);
  DecodedAction dec = decode_action(a, cfg_);

  ris_ = move_ris(ris_, dec.dx, dec.dy, cfg_.x_max, cfg_.y_max);
  ori_ = cfg_.ris_enabled && cfg_.ris_rotatable
             ? dec.orientation
             : Orientation2D::from_angle(cfg_.initial_orientation);
  users_ = step_users(users_, cfg_.mobility, rng_);
  redraw();

  last_mats_ = cfg_.ris_enabled ? build_matrices(dec.elements) : StarMatrices::disabled(cfg_.elements);
  last_bf_ = std::move(dec.beamformer);

  StepResult res;
  res.info.user_rates = user_rates(channels_, regions_, last_mats_, last_bf_, cfg_.noise);
  for (double r : res.info.user_rates) res.reward += r;
  res.info.ris = ris_;
  res.info.orientation = ori_;
  res.info.regions = regions_;

  ++t_;
  done_ = t_ >= cfg_.episode_length;
  res.done = done_;
  res.observation = build_state(channels_, regions_, cfg_.state_scale);
  return res;
}

}  // namespace stardeploy
