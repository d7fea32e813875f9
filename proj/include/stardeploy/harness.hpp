#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "stardeploy/config.hpp"
#include "stardeploy/ppo.hpp"

namespace stardeploy {

// One training batch of one run.
struct MetricsRecord {
  std::string scheme;
  std::size_t elements = 0;
  std::uint64_t seed = 0;
  ppo::BatchMetrics batch;
  double mean_sum_rate = 0.0;  // per time slot, bits/s

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

// Deterministic evaluation of a finished run.
struct FinalRecord {
  std::string scheme;
  std::size_t elements = 0;
  std::uint64_t seed = 0;
  double mean_sum_rate = 0.0;
  std::vector<double> user_rates;  // per-user means over all evaluated slots

  friend bool operator==(const FinalRecord&, const FinalRecord&) = default;
};

// One time slot of a mean-action rollout.
struct EvalRow {
  std::size_t episode = 0;
  std::size_t ts = 0;
  double reward = 0.0;
  double ris_x = 0.0;
  double ris_y = 0.0;
  double orientation = 0.0;
  std::vector<double> rates;

  friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

struct RunResult {
  std::vector<MetricsRecord> metrics;
  std::vector<FinalRecord> finals;
};

// Progress hook: called after every batch.
using ProgressFn = std::function<void(const MetricsRecord&)>;

// Rolls out the mean action for `episodes` episodes. Episode e is reset with
// episode_seed(seed, e), so two policies evaluated with the same seed see the
// same user trajectories and channel draws up to the effect of their actions.
std::vector<EvalRow> evaluate_policy(const ppo::GaussianPolicy& policy, const EnvConfig& env,
                                     std::size_t episodes, std::uint64_t seed);

FinalRecord summarize(const std::vector<EvalRow>& rows, std::string scheme, std::size_t elements,
                      std::uint64_t seed);

// Trains cfg.scheme once per seed. With a non-empty output_dir this writes
//   <out>/<scheme>/metrics.csv, final.csv, manifest.json,
//   <out>/<scheme>/seed_<s>/checkpoint.bin (+ periodic checkpoints),
//   <out>/<scheme>/seed_<s>/eval_rates.csv.
RunResult run_scheme(const ExperimentConfig& cfg, const ProgressFn& progress = {});

// One run_scheme per element count, written under <out>/N<n>/, plus an
// aggregate <out>/sweep.csv.
RunResult sweep_elements(const ExperimentConfig& cfg, const std::vector<std::size_t>& ns,
                         const ProgressFn& progress = {});

// All four schemes with the same seeds, initial pose and evaluation seeds;
// writes <out>/compare.csv.
RunResult compare(const ExperimentConfig& cfg, const ProgressFn& progress = {});

struct SweepPoint {
  std::size_t elements = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};
std::vector<SweepPoint> aggregate_by_elements(const std::vector<FinalRecord>& finals);

// Loads a checkpoint, rebuilds its environment and evaluates it. Writes
// eval_rates.csv when `out_csv` is non-empty.
std::vector<EvalRow> evaluate_checkpoint(const std::filesystem::path& checkpoint, std::size_t episodes,
                                         std::uint64_t seed, const std::filesystem::path& out_csv = {});

// CSV I/O. Numbers are written in shortest round-trip form, so reading a file
// back reproduces the in-memory values exactly.
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRecord>& rows);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);
void write_final_csv(const std::filesystem::path& path, const std::vector<FinalRecord>& rows);
std::vector<FinalRecord> read_final_csv(const std::filesystem::path& path);
void write_eval_csv(const std::filesystem::path& path, const std::vector<EvalRow>& rows);
std::vector<EvalRow> read_eval_csv(const std::filesystem::path& path);

}  // namespace stardeploy
