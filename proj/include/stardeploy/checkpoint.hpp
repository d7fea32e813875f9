#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "stardeploy/nn.hpp"
#include "stardeploy/ppo.hpp"

namespace stardeploy {

// Binary checkpoint: 8-byte magic "SDCKPT\0\0", little-endian u32 version,
// then length-prefixed sections. Doubles are stored bit-for-bit.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::string config_json;  // resolved experiment config the run used
  std::uint64_t seed = 0;
  std::uint64_t batches_done = 0;
  ppo::GaussianPolicy policy;
  nn::Mlp critic;
  nn::AdamState actor_adam;
  nn::AdamState critic_adam;
  std::string rng_state;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

Checkpoint make_checkpoint(const ppo::Trainer& trainer, std::string config_json);

void write_mlp(std::ostream& os, const nn::Mlp& net);
nn::Mlp read_mlp(std::istream& is);

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& is);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace stardeploy
