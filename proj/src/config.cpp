#include "stardeploy/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <string>

#include "stardeploy/error.hpp"

namespace stardeploy {

using nlohmann::json;

namespace {

using Handler = std::function<void(const json&)>;

void apply_section(const json& root, const std::string& section,
                   const std::map<std::string, Handler>& handlers) {
  if (!root.contains(section)) return;
  const json& s = root.at(section);
  if (!s.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
  for (const auto& [key, value] : s.items()) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError("config: unknown key '" + section + "." + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ConfigError("config: bad value for '" + section + "." + key + "': " + e.what());
    }
  }
}

Position3D position_from(const json& v) {
  if (!v.is_array() || v.size() != 3) throw ConfigError("config: positions are [x, y, z] arrays");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

json position_to(const Position3D& p) { return json::array({p.x, p.y, p.z}); }

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Deployment: return "deployment";
    case Scheme::FixedPosition: return "fixed_position";
    case Scheme::FixedPositionAndOrientation: return "fixed_position_orientation";
    case Scheme::NoRis: return "no_ris";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes) {
    if (scheme_name(s) == name) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(name) +
                    "' (expected deployment, fixed_position, fixed_position_orientation or no_ris)");
}

void apply_scheme(EnvConfig& env, Scheme s) {
  env.ris_enabled = s != Scheme::NoRis;
  env.ris_movable = s == Scheme::Deployment;
  env.ris_rotatable = s == Scheme::Deployment || s == Scheme::FixedPosition;
}

void ExperimentConfig::validate() const {
  env.validate();
  hyper.validate();
  if (seeds.empty()) throw ConfigError("experiment: seeds must not be empty");
  if (eval_episodes == 0) throw ConfigError("experiment: eval_episodes must be >= 1");
  for (std::size_t n : element_sweep) {
    ChannelConfig c = env.channel;
    c.elements_per_row = 0;
    c.validate(n);
  }
}

ExperimentConfig paper_profile() { return ExperimentConfig{}; }

ExperimentConfig reduced_profile() {
  ExperimentConfig cfg;
  cfg.env.antennas = 2;
  cfg.env.elements = 16;
  cfg.env.users = 3;
  cfg.hyper.batch_size = 2048;
  cfg.hyper.total_steps = 200'000;
  cfg.seeds = {1, 2, 3, 4, 5};
  return cfg;
}

ExperimentConfig experiment_from_json(const json& j, const ExperimentConfig& base) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig cfg = base;
  if (j.contains("profile")) {
    const auto name = j.at("profile").get<std::string>();
    if (name == "reduced") {
      cfg = reduced_profile();
    } else if (name == "paper") {
      cfg = paper_profile();
    } else {
      throw ConfigError("config: unknown profile '" + name + "'");
    }
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "profile" && key != "system" && key != "ppo" && key != "experiment") {
      throw ConfigError("config: unknown top-level key '" + key + "'");
    }
  }

  EnvConfig& e = cfg.env;
  bool noise_given = false;
  bool noise_inputs_changed = false;
  double noise_figure_db = 10.0;
  apply_section(j, "system", {
      {"M", [&](const json& v) { e.antennas = v.get<std::size_t>(); }},
      {"N", [&](const json& v) { e.elements = v.get<std::size_t>(); }},
      {"K", [&](const json& v) { e.users = v.get<std::size_t>(); }},
      {"T", [&](const json& v) { e.episode_length = v.get<std::size_t>(); }},
      {"f_c_ghz", [&](const json& v) { e.channel.carrier_ghz = v.get<double>(); }},
      {"bandwidth_hz", [&](const json& v) { e.noise.bandwidth_hz = v.get<double>(); noise_inputs_changed = true; }},
      {"noise_figure_db", [&](const json& v) { noise_figure_db = v.get<double>(); noise_inputs_changed = true; }},
      {"noise_power_w", [&](const json& v) { e.noise.sigma2 = v.get<double>(); noise_given = true; }},
      {"p_max_w", [&](const json& v) { e.noise.p_max = v.get<double>(); }},
      {"bs_position", [&](const json& v) { e.bs = position_from(v); }},
      {"ris_initial", [&](const json& v) { e.ris_initial = position_from(v); }},
      {"initial_orientation_rad", [&](const json& v) { e.initial_orientation = v.get<double>(); }},
      {"x_max", [&](const json& v) { e.x_max = v.get<double>(); }},
      {"y_max", [&](const json& v) { e.y_max = v.get<double>(); }},
      {"user_height_m", [&](const json& v) { e.user_height = v.get<double>(); }},
      {"rician_q", [&](const json& v) { e.channel.rician_q = v.get<double>(); }},
      {"antenna_spacing_m", [&](const json& v) { e.channel.antenna_spacing = v.get<double>(); }},
      {"element_spacing_m", [&](const json& v) { e.channel.element_spacing = v.get<double>(); }},
      {"elements_per_row", [&](const json& v) { e.channel.elements_per_row = v.get<std::size_t>(); }},
      {"service_square_m", [&](const json& v) { e.mobility.square_side = v.get<double>(); }},
      {"user_max_step_m", [&](const json& v) { e.mobility.max_step = v.get<double>(); }},
      {"state_scale", [&](const json& v) { e.state_scale = v.get<double>(); }},
  });
  if (noise_inputs_changed && !noise_given) {
    e.noise.sigma2 = thermal_noise_watts(e.noise.bandwidth_hz, noise_figure_db);
  }

  ppo::PpoHyper& h = cfg.hyper;
  apply_section(j, "ppo", {
      {"batch_size", [&](const json& v) { h.batch_size = v.get<std::size_t>(); }},
      {"minibatch_size", [&](const json& v) { h.minibatch_size = v.get<std::size_t>(); }},
      {"epochs", [&](const json& v) { h.epochs = v.get<std::size_t>(); }},
      {"total_steps", [&](const json& v) { h.total_steps = v.get<std::size_t>(); }},
      {"gamma", [&](const json& v) { h.gamma = v.get<double>(); }},
      {"gae_lambda", [&](const json& v) { h.gae_lambda = v.get<double>(); }},
      {"clip_epsilon", [&](const json& v) { h.clip_epsilon = v.get<double>(); }},
      {"learning_rate", [&](const json& v) { h.actor_lr = v.get<double>(); }},
      {"critic_learning_rate", [&](const json& v) { h.critic_lr = v.get<double>(); }},
      {"anneal_actor_lr", [&](const json& v) { h.anneal_actor_lr = v.get<bool>(); }},
      {"normalize_advantages", [&](const json& v) { h.normalize_advantages = v.get<bool>(); }},
      {"entropy_coef", [&](const json& v) { h.entropy_coef = v.get<double>(); }},
      {"initial_log_std", [&](const json& v) { h.initial_log_std = v.get<double>(); }},
      {"reward_scale", [&](const json& v) { h.reward_scale = v.get<double>(); }},
      {"hidden_units", [&](const json& v) { h.hidden_units = v.get<std::size_t>(); }},
      {"adam_beta1", [&](const json& v) { h.adam_beta1 = v.get<double>(); }},
      {"adam_beta2", [&](const json& v) { h.adam_beta2 = v.get<double>(); }},
      {"adam_eps", [&](const json& v) { h.adam_eps = v.get<double>(); }},
  });

  apply_section(j, "experiment", {
      {"scheme", [&](const json& v) { cfg.scheme = parse_scheme(v.get<std::string>()); }},
      {"seeds", [&](const json& v) { cfg.seeds = v.get<std::vector<std::uint64_t>>(); }},
      {"output_dir", [&](const json& v) { cfg.output_dir = v.get<std::string>(); }},
      {"element_sweep", [&](const json& v) { cfg.element_sweep = v.get<std::vector<std::size_t>>(); }},
      {"eval_episodes", [&](const json& v) { cfg.eval_episodes = v.get<std::size_t>(); }},
      {"eval_seed", [&](const json& v) { cfg.eval_seed = v.get<std::uint64_t>(); }},
      {"checkpoint_interval", [&](const json& v) { cfg.checkpoint_interval = v.get<std::size_t>(); }},
  });
  return cfg;
}

json experiment_to_json(const ExperimentConfig& cfg) {
  const EnvConfig& e = cfg.env;
  const ppo::PpoHyper& h = cfg.hyper;
  json j;
  j["system"] = {
      {"M", e.antennas},
      {"N", e.elements},
      {"K", e.users},
      {"T", e.episode_length},
      {"f_c_ghz", e.channel.carrier_ghz},
      {"bandwidth_hz", e.noise.bandwidth_hz},
      {"noise_power_w", e.noise.sigma2},
      {"p_max_w", e.noise.p_max},
      {"bs_position", position_to(e.bs)},
      {"ris_initial", position_to(e.ris_initial)},
      {"initial_orientation_rad", e.initial_orientation},
      {"x_max", e.x_max},
      {"y_max", e.y_max},
      {"user_height_m", e.user_height},
      {"rician_q", e.channel.rician_q},
      {"antenna_spacing_m", e.channel.antenna_spacing},
      {"element_spacing_m", e.channel.element_spacing},
      {"elements_per_row", e.channel.elements_per_row},
      {"service_square_m", e.mobility.square_side},
      {"user_max_step_m", e.mobility.max_step},
      {"state_scale", e.state_scale},
  };
  j["ppo"] = {
      {"batch_size", h.batch_size},
      {"minibatch_size", h.minibatch_size},
      {"epochs", h.epochs},
      {"total_steps", h.total_steps},
      {"gamma", h.gamma},
      {"gae_lambda", h.gae_lambda},
      {"clip_epsilon", h.clip_epsilon},
      {"learning_rate", h.actor_lr},
      {"critic_learning_rate", h.critic_lr},
      {"anneal_actor_lr", h.anneal_actor_lr},
      {"normalize_advantages", h.normalize_advantages},
      {"entropy_coef", h.entropy_coef},
      {"initial_log_std", h.initial_log_std},
      {"reward_scale", h.reward_scale},
      {"hidden_units", h.hidden_units},
      {"adam_beta1", h.adam_beta1},
      {"adam_beta2", h.adam_beta2},
      {"adam_eps", h.adam_eps},
  };
  j["experiment"] = {
      {"scheme", std::string(scheme_name(cfg.scheme))},
      {"seeds", cfg.seeds},
      {"output_dir", cfg.output_dir.string()},
      {"element_sweep", cfg.element_sweep},
      {"eval_episodes", cfg.eval_episodes},
      {"eval_seed", cfg.eval_seed},
      {"checkpoint_interval", cfg.checkpoint_interval},
  };
  return j;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return experiment_from_json(j);
}

}  // namespace stardeploy
