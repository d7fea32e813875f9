#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stardeploy/env.hpp"
#include "stardeploy/ppo.hpp"

namespace stardeploy {

enum class Scheme {
  Deployment,                   // position, orientation and beamforming all learned
  FixedPosition,                // orientation still an action
  FixedPositionAndOrientation,
  NoRis,                        // zero cascade
};

inline constexpr Scheme kAllSchemes[] = {Scheme::Deployment, Scheme::FixedPosition,
                                         Scheme::FixedPositionAndOrientation, Scheme::NoRis};

std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name);

// Sets the env's scheme switches. Observation and action sizes are unaffected.
void apply_scheme(EnvConfig& env, Scheme s);

struct ExperimentConfig {
  EnvConfig env;
  ppo::PpoHyper hyper;
  Scheme scheme = Scheme::Deployment;
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir = "runs";
  std::vector<std::size_t> element_sweep{9, 16, 25};
  std::size_t eval_episodes = 10;
  std::uint64_t eval_seed = 20240;
  std::size_t checkpoint_interval = 0;  // batches; 0 writes only the final checkpoint

  void validate() const;
};

// Full-size system settings with the PPO defaults.
ExperimentConfig paper_profile();
// Desk-scale profile: M=2, N=16, K=3, b=2048, 2e5 steps, five seeds.
ExperimentConfig reduced_profile();

// JSON with "system", "ppo" and "experiment" sections. Missing keys keep the
// values of `base`; unknown keys are rejected.
ExperimentConfig experiment_from_json(const nlohmann::json& j, const ExperimentConfig& base = {});
nlohmann::json experiment_to_json(const ExperimentConfig& cfg);

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace stardeploy
