// Command-line front end: train, evaluate, sweep, compare.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stardeploy/error.hpp"
#include "stardeploy/harness.hpp"
#include "stardeploy/kernels.hpp"

namespace sd = stardeploy;

namespace {

struct Common {
  std::string config;
  std::string profile = "paper";
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--profile", c.profile, "base profile when no config overrides it")
      ->check(CLI::IsMember({"paper", "reduced"}));
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "train a single seed instead of the configured list");
  cmd->add_flag("-q,--quiet", c.quiet, "suppress per-batch progress");
}

sd::ExperimentConfig resolve(const Common& c) {
  sd::ExperimentConfig cfg = c.profile == "reduced" ? sd::reduced_profile() : sd::paper_profile();
  if (!c.config.empty()) {
    std::ifstream is(c.config);
    cfg = sd::experiment_from_json(nlohmann::json::parse(is), cfg);
  }
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.seed) cfg.seeds = {*c.seed};
  return cfg;
}

sd::ProgressFn progress_printer(bool quiet) {
  if (quiet) return {};
  return [](const sd::MetricsRecord& r) {
    std::fprintf(stderr, "[%s N=%zu seed=%llu] batch %zu steps %zu  mean sum-rate %.6g b/s  clip %.3f  std %.3f\n",
                 r.scheme.c_str(), r.elements, static_cast<unsigned long long>(r.seed), r.batch.batch,
                 r.batch.env_steps, r.mean_sum_rate, r.batch.clip_fraction, r.batch.mean_std);
  };
}

void print_finals(const std::vector<sd::FinalRecord>& finals) {
  for (const auto& f : finals) {
    std::printf("%s N=%zu seed=%llu final mean sum-rate %.6g b/s\n", f.scheme.c_str(), f.elements,
                static_cast<unsigned long long>(f.seed), f.mean_sum_rate);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STAR-RIS deployment and beamforming with PPO"};
  app.require_subcommand(1);

  Common train_opts, sweep_opts, compare_opts;
  std::string scheme;
  auto* train = app.add_subcommand("train", "train one scheme for every seed");
  add_common(train, train_opts);
  train->add_option("--scheme", scheme, "deployment | fixed_position | fixed_position_orientation | no_ris");

  std::string checkpoint, eval_out;
  std::size_t episodes = 10;
  std::uint64_t eval_seed = 20240;
  auto* evaluate = app.add_subcommand("evaluate", "roll out the mean action of a checkpoint");
  evaluate->add_option("--checkpoint", checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--episodes", episodes, "episodes to evaluate")->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", eval_seed, "evaluation seed");
  evaluate->add_option("--out", eval_out, "eval_rates.csv path (default: next to the checkpoint)");

  std::vector<std::size_t> elements;
  auto* sweep = app.add_subcommand("sweep", "train over several STAR-RIS element counts");
  add_common(sweep, sweep_opts);
  sweep->add_option("--elements", elements, "element counts, each a perfect square (default: from config)");

  auto* cmp = app.add_subcommand("compare", "train all four schemes with paired seeds");
  add_common(cmp, compare_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    std::fprintf(stderr, "kernels: %s\n", std::string(sd::kernels::active().name).c_str());
    const auto t0 = std::chrono::steady_clock::now();
    if (*train) {
      auto cfg = resolve(train_opts);
      if (!scheme.empty()) cfg.scheme = sd::parse_scheme(scheme);
      print_finals(sd::run_scheme(cfg, progress_printer(train_opts.quiet)).finals);
    } else if (*evaluate) {
      std::filesystem::path out = eval_out.empty() ? std::filesystem::path(checkpoint).parent_path() / "eval_rates.csv"
                                                   : std::filesystem::path(eval_out);
      const auto rows = sd::evaluate_checkpoint(checkpoint, episodes, eval_seed, out);
      double total = 0.0;
      for (const auto& r : rows) total += r.reward;
      std::printf("%zu slots, mean sum-rate %.6g b/s -> %s\n", rows.size(),
                  rows.empty() ? 0.0 : total / static_cast<double>(rows.size()), out.string().c_str());
    } else if (*sweep) {
      auto cfg = resolve(sweep_opts);
      if (elements.empty()) elements = cfg.element_sweep;
      const auto res = sd::sweep_elements(cfg, elements, progress_printer(sweep_opts.quiet));
      print_finals(res.finals);
      for (const auto& p : sd::aggregate_by_elements(res.finals)) {
        std::printf("N=%zu mean %.6g b/s (s.e. %.3g, %zu seeds)\n", p.elements, p.mean, p.std_error, p.count);
      }
    } else if (*cmp) {
      auto cfg = resolve(compare_opts);
      print_finals(sd::compare(cfg, progress_printer(compare_opts.quiet)).finals);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "done in %.1f s\n", secs);
  } catch (const sd::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  return 0;
}
