#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stardeploy/channel.hpp"
#include "stardeploy/geometry.hpp"
#include "stardeploy/link.hpp"
#include "stardeploy/random.hpp"
#include "stardeploy/starris.hpp"

namespace stardeploy {

using Observation = std::vector<double>;
using ActionVector = std::vector<double>;

struct EnvConfig {
  std::size_t antennas = 4;         // M
  std::size_t elements = 25;        // N
  std::size_t users = 6;            // K
  std::size_t episode_length = 50;  // T, in time slots
  Position3D bs{2000.0, 2000.0, 5.0};
  Position3D ris_initial{0.0, 0.0, 10.0};
  double initial_orientation = 0.0;  // radians from the x-axis
  double x_max = 5.0;
  double y_max = 5.0;
  double user_height = kUserHeight;
  ChannelConfig channel;
  NoiseModel noise;
  MobilityConfig mobility;  // the square is re-centered on ris_initial
  double state_scale = 1e6;

  // Scheme switches. A disabled RIS contributes a zero cascade.
  bool ris_enabled = true;
  bool ris_movable = true;
  bool ris_rotatable = true;

  std::size_t observation_size() const;
  std::size_t action_size() const;
  void validate() const;
};

// Offsets of each block inside an action vector.
struct ActionLayout {
  std::size_t theta_t, beta, theta_r_sign, bs_phase, bs_amplitude, x_move, y_move, orientation, size;

  explicit ActionLayout(const EnvConfig& cfg);
};

struct DecodedAction {
  StarElements elements;
  Beamformer beamformer;
  double dx = 0.0;
  double dy = 0.0;
  Orientation2D orientation;
};

// Linear maps from [-1, 1] to the feasible set; entries are clamped first.
DecodedAction decode_action(std::span<const double> action, const EnvConfig& cfg);

// Zeroes the entries a scheme does not control. Length is unchanged.
void mask_action(std::span<double> action, const EnvConfig& cfg);

Observation build_state(const ChannelRealization& ch, std::span<const Region> regions, double scale);

struct UnpackedState {
  ChannelRealization channels;
  std::vector<Region> regions;
};
UnpackedState unflatten_state(std::span<const double> obs, std::size_t antennas,
                              std::size_t elements, std::size_t users, double scale);

struct StepInfo {
  std::vector<double> user_rates;
  Position3D ris;
  Orientation2D orientation;
  std::vector<Region> regions;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;  // bits/s
  bool done = false;
  StepInfo info;
};

/// Single-threaded episode simulator. Each instance owns its random stream;
/// run separate instances for parallel rollouts.
class Environment {
 public:
  explicit Environment(EnvConfig cfg);

  Observation reset(std::uint64_t seed);
  StepResult step(std::span<const double> action);

  const EnvConfig& config() const { return cfg_; }
  std::size_t time_slot() const { return t_; }
  bool done() const { return done_; }
  const Position3D& ris() const { return ris_; }
  const Orientation2D& orientation() const { return ori_; }
  const std::vector<Position3D>& users() const { return users_; }
  const ChannelRealization& channels() const { return channels_; }
  const std::vector<Region>& regions() const { return regions_; }
  // Matrices applied in the most recent step.
  const StarMatrices& last_matrices() const { return last_mats_; }
  const Beamformer& last_beamformer() const { return last_bf_; }

 private:
  void redraw();

  EnvConfig cfg_;
  RandomStream rng_;
  std::vector<Position3D> users_;
  Position3D ris_;
  Orientation2D ori_;
  ChannelRealization channels_;
  std::vector<Region> regions_;
  StarMatrices last_mats_;
  Beamformer last_bf_;
  std::size_t t_ = 0;
  bool started_ = false;
  bool done_ = false;
};

}  // namespace stardeploy
