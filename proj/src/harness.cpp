#include "stardeploy/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "stardeploy/checkpoint.hpp"
#include "stardeploy/error.hpp"
#include "stardeploy/kernels.hpp"

namespace stardeploy {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s, const fs::path& path) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw IoError(path.string() + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view s, const fs::path& path) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw IoError(path.string() + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw IoError(path.string() + ": empty file");
  t.header = split(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw IoError(path.string() + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                    std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::size_t count_prefixed(const std::vector<std::string>& header, std::string_view prefix) {
  std::size_t n = 0;
  for (const auto& h : header) {
    if (h.rfind(prefix, 0) == 0) ++n;
  }
  return n;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  return os;
}

void finish(std::ofstream& os, const fs::path& path) {
  os.flush();
  if (!os) throw IoError("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
  finish(os, path);
}

ExperimentConfig with_scheme(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  apply_scheme(c.env, c.scheme);
  return c;
}

}  // namespace

std::vector<EvalRow> evaluate_policy(const ppo::GaussianPolicy& policy, const EnvConfig& env_cfg,
                                     std::size_t episodes, std::uint64_t seed) {
  Environment env(env_cfg);
  if (policy.action_size() != env_cfg.action_size()) {
    throw_dimension("evaluate_policy: policy action size", env_cfg.action_size(), policy.action_size());
  }
  std::vector<EvalRow> rows;
  rows.reserve(episodes * env_cfg.episode_length);
  for (std::size_t e = 0; e < episodes; ++e) {
    Observation obs = env.reset(ppo::episode_seed(seed, e));
    while (!env.done()) {
      const std::vector<double> action = ppo::mean_action(policy, obs);
      StepResult r = env.step(action);
      EvalRow row;
      row.episode = e;
      row.ts = env.time_slot();
      row.reward = r.reward;
      row.ris_x = r.info.ris.x;
      row.ris_y = r.info.ris.y;
      row.orientation = r.info.orientation.angle();
      row.rates = std::move(r.info.user_rates);
      rows.push_back(std::move(row));
      obs = std::move(r.observation);
    }
  }
  return rows;
}

FinalRecord summarize(const std::vector<EvalRow>& rows, std::string scheme, std::size_t elements,
                      std::uint64_t seed) {
  FinalRecord f;
  f.scheme = std::move(scheme);
  f.elements = elements;
  f.seed = seed;
  if (rows.empty()) return f;
  f.user_rates.assign(rows.front().rates.size(), 0.0);
  for (const auto& r : rows) {
    f.mean_sum_rate += r.reward;
    for (std::size_t k = 0; k < f.user_rates.size(); ++k) f.user_rates[k] += r.rates[k];
  }
  const double n = static_cast<double>(rows.size());
  f.mean_sum_rate /= n;
  for (double& u : f.user_rates) u /= n;
  return f;
}

RunResult run_scheme(const ExperimentConfig& base, const ProgressFn& progress) {
  const ExperimentConfig cfg = with_scheme(base);
  cfg.validate();
  const std::string scheme(scheme_name(cfg.scheme));
  const bool write = !cfg.output_dir.empty();
  const fs::path dir = cfg.output_dir / scheme;
  const std::string config_text = experiment_to_json(cfg).dump();
  const EnvConfig env_cfg = cfg.env;
  const double slots = static_cast<double>(env_cfg.episode_length);

  RunResult result;
  for (std::uint64_t seed : cfg.seeds) {
    const fs::path seed_dir = dir / ("seed_" + std::to_string(seed));
    ppo::Trainer trainer([&env_cfg] { return Environment(env_cfg); }, cfg.hyper, seed);
    while (!trainer.finished()) {
      MetricsRecord rec;
      rec.scheme = scheme;
      rec.elements = env_cfg.elements;
      rec.seed = seed;
      rec.batch = trainer.run_batch();
      rec.mean_sum_rate = rec.batch.mean_episode_reward / slots;
      if (progress) progress(rec);
      result.metrics.push_back(std::move(rec));
      if (write && cfg.checkpoint_interval > 0 && trainer.batches_done() % cfg.checkpoint_interval == 0 &&
          !trainer.finished()) {
        fs::create_directories(seed_dir);
        save_checkpoint(seed_dir / ("checkpoint_b" + std::to_string(trainer.batches_done()) + ".bin"),
                        make_checkpoint(trainer, config_text));
      }
    }
    const auto rows = evaluate_policy(trainer.policy(), env_cfg, cfg.eval_episodes, cfg.eval_seed);
    result.finals.push_back(summarize(rows, scheme, env_cfg.elements, seed));
    if (write) {
      fs::create_directories(seed_dir);
      save_checkpoint(seed_dir / "checkpoint.bin", make_checkpoint(trainer, config_text));
      write_eval_csv(seed_dir / "eval_rates.csv", rows);
    }
  }

  if (write) {
    write_metrics_csv(dir / "metrics.csv", result.metrics);
    write_final_csv(dir / "final.csv", result.finals);
    json manifest;
    manifest["scheme"] = scheme;
    manifest["seeds"] = cfg.seeds;
    manifest["config"] = experiment_to_json(cfg);
    manifest["kernels"] = std::string(kernels::active().name);
    manifest["checkpoint_version"] = kCheckpointVersion;
    manifest["observation_size"] = env_cfg.observation_size();
    manifest["action_size"] = env_cfg.action_size();
    manifest["num_batches"] = cfg.hyper.num_batches();
    write_json(dir / "manifest.json", manifest);
  }
  return result;
}

std::vector<SweepPoint> aggregate_by_elements(const std::vector<FinalRecord>& finals) {
  std::vector<SweepPoint> pts;
  for (const auto& f : finals) {
    auto it = std::find_if(pts.begin(), pts.end(), [&](const SweepPoint& p) { return p.elements == f.elements; });
    if (it == pts.end()) {
      pts.push_back({f.elements, 0.0, 0.0, 0});
      it = pts.end() - 1;
    }
    it->mean += f.mean_sum_rate;
    ++it->count;
  }
  for (auto& p : pts) {
    p.mean /= static_cast<double>(p.count);
    double ss = 0.0;
    for (const auto& f : finals) {
      if (f.elements == p.elements) ss += (f.mean_sum_rate - p.mean) * (f.mean_sum_rate - p.mean);
    }
    p.std_error = p.count > 1 ? std::sqrt(ss / static_cast<double>(p.count - 1) / static_cast<double>(p.count)) : 0.0;
  }
  return pts;
}

RunResult sweep_elements(const ExperimentConfig& cfg, const std::vector<std::size_t>& ns, const ProgressFn& progress) {
  if (ns.empty()) throw ConfigError("sweep: element list is empty");
  RunResult all;
  for (std::size_t n : ns) {
    ExperimentConfig c = cfg;
    c.env.elements = n;
    c.env.channel.elements_per_row = 0;
    if (!cfg.output_dir.empty()) c.output_dir = cfg.output_dir / ("N" + std::to_string(n));
    RunResult r = run_scheme(c, progress);
    all.metrics.insert(all.metrics.end(), r.metrics.begin(), r.metrics.end());
    all.finals.insert(all.finals.end(), r.finals.begin(), r.finals.end());
  }
  if (!cfg.output_dir.empty()) {
    const fs::path path = cfg.output_dir / "sweep.csv";
    auto os = open_out(path);
    os << "elements,count,mean_sum_rate,std_error\n";
    for (const auto& p : aggregate_by_elements(all.finals)) {
      os << p.elements << ',' << p.count << ',' << fmt(p.mean) << ',' << fmt(p.std_error) << '\n';
    }
    finish(os, path);
  }
  return all;
}

RunResult compare(const ExperimentConfig& cfg, const ProgressFn& progress) {
  RunResult all;
  for (Scheme s : kAllSchemes) {
    ExperimentConfig c = cfg;
    c.scheme = s;
    RunResult r = run_scheme(c, progress);
    all.metrics.insert(all.metrics.end(), r.metrics.begin(), r.metrics.end());
    all.finals.insert(all.finals.end(), r.finals.begin(), r.finals.end());
  }
  if (!cfg.output_dir.empty()) write_final_csv(cfg.output_dir / "compare.csv", all.finals);
  return all;
}

std::vector<EvalRow> evaluate_checkpoint(const fs::path& checkpoint, std::size_t episodes, std::uint64_t seed,
                                         const fs::path& out_csv) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  ExperimentConfig cfg;
  try {
    cfg = experiment_from_json(json::parse(ckpt.config_json));
  } catch (const json::exception& e) {
    throw CheckpointError(checkpoint.string() + ": embedded config is not valid JSON: " + e.what());
  }
  cfg = with_scheme(cfg);
  cfg.env.validate();
  auto rows = evaluate_policy(ckpt.policy, cfg.env, episodes, seed);
  if (!out_csv.empty()) write_eval_csv(out_csv, rows);
  return rows;
}

void write_metrics_csv(const fs::path& path, const std::vector<MetricsRecord>& rows) {
  auto os = open_out(path);
  os << "scheme,elements,seed,batch,env_steps,episodes,mean_episode_reward,mean_sum_rate,"
        "actor_loss,critic_loss,clip_fraction,mean_std,actor_lr\n";
  for (const auto& r : rows) {
    const auto& b = r.batch;
    os << r.scheme << ',' << r.elements << ',' << r.seed << ',' << b.batch << ',' << b.env_steps << ','
       << b.episodes << ',' << fmt(b.mean_episode_reward) << ',' << fmt(r.mean_sum_rate) << ','
       << fmt(b.actor_loss) << ',' << fmt(b.critic_loss) << ',' << fmt(b.clip_fraction) << ','
       << fmt(b.mean_std) << ',' << fmt(b.actor_lr) << '\n';
  }
  finish(os, path);
}

std::vector<MetricsRecord> read_metrics_csv(const fs::path& path) {
  const Table t = read_table(path);
  if (t.header.size() != 13) throw IoError(path.string() + ": unexpected metrics header");
  std::vector<MetricsRecord> out;
  for (const auto& c : t.rows) {
    MetricsRecord r;
    r.scheme = c[0];
    r.elements = parse_uint(c[1], path);
    r.seed = parse_uint(c[2], path);
    r.batch.batch = parse_uint(c[3], path);
    r.batch.env_steps = parse_uint(c[4], path);
    r.batch.episodes = parse_uint(c[5], path);
    r.batch.mean_episode_reward = parse_double(c[6], path);
    r.mean_sum_rate = parse_double(c[7], path);
    r.batch.actor_loss = parse_double(c[8], path);
    r.batch.critic_loss = parse_double(c[9], path);
    r.batch.clip_fraction = parse_double(c[10], path);
    r.batch.mean_std = parse_double(c[11], path);
    r.batch.actor_lr = parse_double(c[12], path);
    out.push_back(std::move(r));
  }
  return out;
}

void write_final_csv(const fs::path& path, const std::vector<FinalRecord>& rows) {
  const std::size_t users = rows.empty() ? 0 : rows.front().user_rates.size();
  auto os = open_out(path);
  os << "scheme,elements,seed,mean_sum_rate";
  for (std::size_t k = 0; k < users; ++k) os << ",rate_" << k;
  os << '\n';
  for (const auto& r : rows) {
    if (r.user_rates.size() != users) throw_dimension("write_final_csv: user count", users, r.user_rates.size());
    os << r.scheme << ',' << r.elements << ',' << r.seed << ',' << fmt(r.mean_sum_rate);
    for (double u : r.user_rates) os << ',' << fmt(u);
    os << '\n';
  }
  finish(os, path);
}

std::vector<FinalRecord> read_final_csv(const fs::path& path) {
  const Table t = read_table(path);
  const std::size_t users = count_prefixed(t.header, "rate_");
  if (t.header.size() != 4 + users) throw IoError(path.string() + ": unexpected final header");
  std::vector<FinalRecord> out;
  for (const auto& c : t.rows) {
    FinalRecord r;
    r.scheme = c[0];
    r.elements = parse_uint(c[1], path);
    r.seed = parse_uint(c[2], path);
    r.mean_sum_rate = parse_double(c[3], path);
    for (std::size_t k = 0; k < users; ++k) r.user_rates.push_back(parse_double(c[4 + k], path));
    out.push_back(std::move(r));
  }
  return out;
}

void write_eval_csv(const fs::path& path, const std::vector<EvalRow>& rows) {
  const std::size_t users = rows.empty() ? 0 : rows.front().rates.size();
  auto os = open_out(path);
  os << "episode,ts,reward,ris_x,ris_y,orientation";
  for (std::size_t k = 0; k < users; ++k) os << ",rate_" << k;
  os << '\n';
  for (const auto& r : rows) {
    os << r.episode << ',' << r.ts << ',' << fmt(r.reward) << ',' << fmt(r.ris_x) << ',' << fmt(r.ris_y) << ','
       << fmt(r.orientation);
    for (double u : r.rates) os << ',' << fmt(u);
    os << '\n';
  }
  finish(os, path);
}

std::vector<EvalRow> read_eval_csv(const fs::path& path) {
  const Table t = read_table(path);
  const std::size_t users = count_prefixed(t.header, "rate_");
  if (t.header.size() != 6 + users) throw IoError(path.string() + ": unexpected eval header");
  std::vector<EvalRow> out;
  for (const auto& c : t.rows) {
    EvalRow r;
    r.episode = parse_uint(c[0], path);
    r.ts = parse_uint(c[1], path);
    r.reward = parse_double(c[2], path);
    r.ris_x = parse_double(c[3], path);
    r.ris_y = parse_double(c[4], path);
    r.orientation = parse_double(c[5], path);
    for (std::size_t k = 0; k < users; ++k) r.rates.push_back(parse_double(c[6 + k], path));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace stardeploy
