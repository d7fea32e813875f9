#include "stardeploy/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "stardeploy/error.hpp"

namespace stardeploy {

namespace {

constexpr std::array<char, 8> kMagic{'S', 'D', 'C', 'K', 'P', 'T', '\0', '\0'};

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), 8);
  if (!is) throw CheckpointError("checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

void put_doubles(std::ostream& os, std::span<const double> v) {
  put_u64(os, v.size());
  for (double d : v) put_f64(os, d);
}

std::vector<double> get_doubles(std::istream& is, std::uint64_t max_count = (1ull << 32)) {
  const std::uint64_t n = get_u64(is);
  if (n > max_count) throw CheckpointError("checkpoint array length is implausible");
  std::vector<double> v(n);
  for (auto& d : v) d = get_f64(is);
  return v;
}

void put_string(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
  const std::uint64_t n = get_u64(is);
  if (n > (1ull << 30)) throw CheckpointError("checkpoint string length is implausible");
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw CheckpointError("checkpoint truncated");
  return s;
}

void write_adam(std::ostream& os, const nn::AdamState& s) {
  put_doubles(os, s.m);
  put_doubles(os, s.v);
  put_u64(os, s.step);
  put_f64(os, s.beta1);
  put_f64(os, s.beta2);
  put_f64(os, s.eps);
}

nn::AdamState read_adam(std::istream& is) {
  nn::AdamState s;
  s.m = get_doubles(is);
  s.v = get_doubles(is);
  s.step = get_u64(is);
  s.beta1 = get_f64(is);
  s.beta2 = get_f64(is);
  s.eps = get_f64(is);
  if (s.m.size() != s.v.size()) throw CheckpointError("checkpoint Adam moments differ in length");
  return s;
}

}  // namespace

Checkpoint make_checkpoint(const ppo::Trainer& trainer, std::string config_json) {
  Checkpoint c;
  c.config_json = std::move(config_json);
  c.seed = trainer.seed();
  c.batches_done = trainer.batches_done();
  c.policy = trainer.policy();
  c.critic = trainer.critic();
  c.actor_adam = trainer.actor_adam();
  c.critic_adam = trainer.critic_adam();
  c.rng_state = trainer.rng().save_state();
  return c;
}

void write_mlp(std::ostream& os, const nn::Mlp& net) {
  const nn::MlpShape& s = net.shape();
  put_u64(os, s.inputs);
  put_u64(os, s.hidden);
  put_u64(os, s.outputs);
  put_u64(os, s.tanh_output ? 1 : 0);
  put_doubles(os, net.params());
}

nn::Mlp read_mlp(std::istream& is) {
  nn::MlpShape s;
  s.inputs = get_u64(is);
  s.hidden = get_u64(is);
  s.outputs = get_u64(is);
  s.tanh_output = get_u64(is) != 0;
  if (s.inputs == 0 || s.hidden == 0 || s.outputs == 0 || s.inputs > (1u << 24) ||
      s.hidden > (1u << 24) || s.outputs > (1u << 24)) {
    throw CheckpointError("checkpoint network shape is invalid");
  }
  nn::Mlp net(s);
  const std::vector<double> p = get_doubles(is);
  if (p.size() != s.parameter_count()) throw CheckpointError("checkpoint network parameter count mismatch");
  std::copy(p.begin(), p.end(), net.params().begin());
  return net;
}

void write_checkpoint(std::ostream& os, const Checkpoint& c) {
  os.write(kMagic.data(), kMagic.size());
  put_u64(os, kCheckpointVersion);
  put_string(os, c.config_json);
  put_u64(os, c.seed);
  put_u64(os, c.batches_done);
  write_mlp(os, c.policy.mean);
  put_doubles(os, c.policy.log_std);
  write_mlp(os, c.critic);
  write_adam(os, c.actor_adam);
  write_adam(os, c.critic_adam);
  put_string(os, c.rng_state);
}

Checkpoint read_checkpoint(std::istream& is) {
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw CheckpointError("not a checkpoint file (bad magic)");
  const std::uint64_t version = get_u64(is);
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint c;
  c.config_json = get_string(is);
  c.seed = get_u64(is);
  c.batches_done = get_u64(is);
  c.policy.mean = read_mlp(is);
  c.policy.log_std = get_doubles(is);
  if (c.policy.log_std.size() != c.policy.mean.shape().outputs) {
    throw CheckpointError("checkpoint log-std length does not match the policy head");
  }
  c.critic = read_mlp(is);
  c.actor_adam = read_adam(is);
  c.critic_adam = read_adam(is);
  c.rng_state = get_string(is);
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path.string());
  write_checkpoint(os, ckpt);
  if (!os) throw IoError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path.string());
  try {
    return read_checkpoint(is);
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

}  // namespace stardeploy
