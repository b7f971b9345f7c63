#include "sambandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace sambandit {

using nlohmann::json;

namespace {

// Stream tags keep environment draws and any policy-internal randomness on
// disjoint generator streams per trial.
constexpr std::uint64_t kStreamEnv = 0x11;

constexpr double kHighSuccess = 0.9;

std::string hash_hex(std::uint64_t h) {
  std::ostringstream out;
  out << "0x" << std::hex << h;
  return out.str();
}

int worker_count(int trials) {
  const unsigned hw = std::thread::hardware_concurrency();
  return std::max(1, std::min<int>(trials, hw == 0 ? 4 : static_cast<int>(hw)));
}

// Runs a function over trial indices [0, trials) on a small pool; results are
// merged by the caller in trial order so parallelism never changes output.
template <typename Fn>
void parallel_trials(int trials, const Fn& run_one) {
  const int workers = worker_count(trials);
  if (workers == 1) {
    for (int i = 0; i < trials; ++i) run_one(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= trials) return;
      try {
        run_one(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (std::thread& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// One policy instance behind a uniform step interface.
class PolicyRunner {
 public:
  PolicyRunner(const std::string& name, const ExperimentConfig& config,
               const Eigen::VectorXd& beta_star) {
    const int d = config.env.d;
    if (name == "sam" || name == "naive_lasso") {
      BanditConfig bcfg = config.bandit.to_bandit_config(d, config.env.b);
      bcfg.adjust_moments = name == "sam";
      lasso_ = std::make_unique<SamBandit>(bcfg);
    } else if (name == "ols") {
      ols_ = std::make_unique<OlsBandit>(d, config.bandit.ols_ridge,
                                         config.bandit.zeta_floor);
    } else if (name == "oracle") {
      oracle_ = std::make_unique<OraclePolicy>(beta_star);
    } else {
      throw ConfigError("unknown policy '" + name + "'");
    }
  }

  RoundOutcome step(const ContextRound& round, const RewardFn& fn) {
    if (lasso_) return lasso_->step(round, fn);
    if (ols_) return ols_->step(round, fn);
    return oracle_->step(round, fn);
  }

 private:
  std::unique_ptr<SamBandit> lasso_;
  std::unique_ptr<OlsBandit> ols_;
  std::unique_ptr<OraclePolicy> oracle_;
};

struct TrialOutput {
  // records[p][t] holds round t+1 of policy p, in config policy order.
  std::vector<std::vector<RunLogRecord>> records;
  std::vector<double> final_regret;
  std::uint64_t trajectory_hash = 0;
  bool shared = true;
};

TrialOutput run_trial(const ExperimentConfig& config, int trial) {
  const std::int64_t horizon = config.env.T;
  TrialOutput out;
  out.records.resize(config.policies.size());
  out.final_regret.resize(config.policies.size(), 0.0);

  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    const std::string& name = config.policies[p];
    // Every policy replays the identical environment stream: same contexts,
    // masks, and noise, so outcome differences are pure policy effect.
    SyntheticEnv env(config.env,
                     seed_stream(config.seed, static_cast<std::uint64_t>(trial),
                                 kStreamEnv));
    PolicyRunner policy(name, config, env.beta_star());

    std::vector<RunLogRecord>& rows = out.records[p];
    rows.reserve(static_cast<std::size_t>(horizon));
    double cumulative = 0.0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
      const ContextRound round = env.next_round();
      const double noise = env.next_noise();
      const RewardFn fn = [&](int arm) {
        RewardFeedback fb;
        fb.reward = env.reward_of(round, arm, noise);
        fb.regret = regret_of(round, env.beta_star(), arm);
        return fb;
      };
      const RoundOutcome step = policy.step(round, fn);
      cumulative += step.regret;

      RunLogRecord rec;
      rec.trial = trial;
      rec.t = t;
      rec.policy = name;
      rec.chosen_arm = step.chosen_arm;
      rec.reward = step.reward;
      rec.regret = step.regret;
      rec.cumulative_regret = cumulative;
      rec.eta_t = step.eta_t;
      rec.zeta_min_hat = step.zeta_min_hat;
      rec.beta_l1 = step.beta_l1;
      rec.solver_iterations = step.solver_iterations;
      rows.push_back(std::move(rec));
    }
    out.final_regret[p] = cumulative;
    if (p == 0) {
      out.trajectory_hash = env.trajectory_hash();
    } else if (env.trajectory_hash() != out.trajectory_hash) {
      out.shared = false;
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

void persist_summary(const ExperimentConfig& config, const json& summary) {
  const std::filesystem::path dir(config.output_dir);
  write_text((dir / "summary.json").string(), summary.dump(2) + "\n");
  config.save((dir / "config.json").string());
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, static_cast<std::size_t>(res.ptr - buf));
}

double rate_normalization(double zeta_min, int s0, std::int64_t T, int d) {
  if (!(zeta_min > 0.0)) throw ConfigError("rate_normalization: zeta_min must be > 0");
  if (s0 < 1 || T < 1 || d < 1)
    throw ConfigError("rate_normalization: s0, T, d must be >= 1");
  const double td = static_cast<double>(T) * static_cast<double>(d);
  return zeta_min * zeta_min /
         std::sqrt(static_cast<double>(s0) * static_cast<double>(T) * std::log(td));
}

SimulateResult simulate_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.mode != "simulate" && config.mode != "sweep")
    throw ConfigError("simulate_experiment: config mode is '" + config.mode + "'");

  std::vector<TrialOutput> trials(static_cast<std::size_t>(config.trials));
  parallel_trials(config.trials, [&](int i) {
    trials[static_cast<std::size_t>(i)] = run_trial(config, i);
  });

  SimulateResult result;
  result.records.reserve(static_cast<std::size_t>(config.trials) *
                         static_cast<std::size_t>(config.env.T) *
                         config.policies.size());
  for (const TrialOutput& trial : trials) {
    result.trajectory_hashes.push_back(trial.trajectory_hash);
    result.shared_trajectories = result.shared_trajectories && trial.shared;
    for (std::int64_t t = 0; t < config.env.T; ++t)
      for (std::size_t p = 0; p < config.policies.size(); ++p)
        result.records.push_back(trial.records[p][static_cast<std::size_t>(t)]);
  }

  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    double mean = 0.0;
    for (const TrialOutput& trial : trials) mean += trial.final_regret[p];
    mean /= static_cast<double>(config.trials);
    double var = 0.0;
    for (const TrialOutput& trial : trials) {
      const double dlt = trial.final_regret[p] - mean;
      var += dlt * dlt;
    }
    var = config.trials > 1 ? var / static_cast<double>(config.trials - 1) : 0.0;
    result.policy_summaries[config.policies[p]] =
        PolicySummary{mean, std::sqrt(var)};
  }
  return result;
}

SweepResult sweep_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.mode != "sweep")
    throw ConfigError("sweep_experiment: config mode is '" + config.mode + "'");

  SweepResult result;
  for (double zeta : config.zeta_grid) {
    ExperimentConfig point = config;
    point.env.zeta = Eigen::VectorXd::Constant(config.env.d, zeta);
    point.policies = {"sam"};
    const SimulateResult sim = simulate_experiment(point);
    const PolicySummary& summary = sim.policy_summaries.at("sam");

    SweepRow row;
    row.zeta = zeta;
    row.final_regret_mean = summary.final_regret_mean;
    row.final_regret_sd = summary.final_regret_sd;
    row.normalized_regret =
        summary.final_regret_mean *
        rate_normalization(zeta, config.env.s0, config.env.T, config.env.d);
    result.rows.push_back(row);
  }

  double lo = result.rows.front().normalized_regret;
  double hi = lo;
  for (const SweepRow& row : result.rows) {
    lo = std::min(lo, row.normalized_regret);
    hi = std::max(hi, row.normalized_regret);
  }
  result.normalized_max_min_ratio = lo > 0.0 ? hi / lo : 0.0;
  return result;
}

GeneProbeResult geneprobe_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.mode != "geneprobe")
    throw ConfigError("geneprobe_experiment: config mode is '" + config.mode + "'");

  const ExpressionDataset dataset =
      load_expression(config.geneprobe.dataset, config.geneprobe.raw_counts);

  ProbeSelectionConfig pcfg;
  pcfg.arms_per_round = config.geneprobe.arms_per_round;
  pcfg.pulls = config.geneprobe.pulls;
  pcfg.alpha = config.geneprobe.alpha;
  pcfg.reward_noise_sd = config.geneprobe.reward_noise_sd;
  pcfg.ols_ridge = config.bandit.ols_ridge;
  pcfg.bandit = config.bandit.to_bandit_config(dataset.samples(), 1.0);

  GeneProbeResult result;
  result.policy = config.policies.front();
  result.series = run_probe_selection(dataset, pcfg, result.policy, config.trials,
                                      config.seed);
  if (!result.series.any_significant)
    std::cerr << "warning: no probe is significant on the full data; "
                 "success rate stays 0\n";
  for (std::size_t t = 0; t < result.series.success_rate.size(); ++t) {
    if (result.series.success_rate[t] >= kHighSuccess) {
      result.time_to_high = static_cast<std::int64_t>(t) + 1;
      break;
    }
  }
  return result;
}

std::string run_log_csv(const std::vector<RunLogRecord>& records) {
  std::string out(kRunLogHeader);
  out += '\n';
  for (const RunLogRecord& r : records) {
    out += std::to_string(r.trial);
    out += ',';
    out += std::to_string(r.t);
    out += ',';
    out += r.policy;
    out += ',';
    out += std::to_string(r.chosen_arm);
    out += ',';
    out += format_double(r.reward);
    out += ',';
    out += format_double(r.regret);
    out += ',';
    out += format_double(r.cumulative_regret);
    out += ',';
    out += format_double(r.eta_t);
    out += ',';
    out += format_double(r.zeta_min_hat);
    out += ',';
    out += format_double(r.beta_l1);
    out += ',';
    out += std::to_string(r.solver_iterations);
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out(kSweepHeader);
  out += '\n';
  for (const SweepRow& row : result.rows) {
    out += format_double(row.zeta);
    out += ',';
    out += format_double(row.final_regret_mean);
    out += ',';
    out += format_double(row.final_regret_sd);
    out += ',';
    out += format_double(row.normalized_regret);
    out += '\n';
  }
  return out;
}

std::string success_csv(const GeneProbeResult& result) {
  std::string out(kSuccessHeader);
  out += '\n';
  for (std::size_t t = 0; t < result.series.success_rate.size(); ++t) {
    out += std::to_string(t + 1);
    out += ',';
    out += format_double(result.series.success_rate[t]);
    out += ',';
    out += std::to_string(result.series.trials);
    out += '\n';
  }
  return out;
}

std::string run_simulate(const ExperimentConfig& config) {
  const SimulateResult result = simulate_experiment(config);
  std::filesystem::create_directories(config.output_dir);

  const std::filesystem::path dir(config.output_dir);
  const std::string log_path = (dir / "run_log.csv").string();
  write_text(log_path, run_log_csv(result.records));

  json policies = json::object();
  for (const auto& [name, summary] : result.policy_summaries)
    policies[name] = {{"final_cumulative_regret_mean", summary.final_regret_mean},
                      {"final_cumulative_regret_sd", summary.final_regret_sd}};
  json hashes = json::array();
  for (std::uint64_t h : result.trajectory_hashes) hashes.push_back(hash_hex(h));

  json summary = {{"schema", "sim-summary/1"},
                  {"mode", "simulate"},
                  {"trials", config.trials},
                  {"T", config.env.T},
                  {"policies", policies},
                  {"trajectories", {{"shared", result.shared_trajectories},
                                    {"hashes", hashes}}}};
  persist_summary(config, summary);
  return log_path;
}

std::string run_sweep(const ExperimentConfig& config) {
  const SweepResult result = sweep_experiment(config);
  std::filesystem::create_directories(config.output_dir);

  const std::filesystem::path dir(config.output_dir);
  const std::string csv_path = (dir / "sweep.csv").string();
  write_text(csv_path, sweep_csv(result));

  json rows = json::array();
  for (const SweepRow& row : result.rows)
    rows.push_back({{"zeta", row.zeta},
                    {"final_regret_mean", row.final_regret_mean},
                    {"final_regret_sd", row.final_regret_sd},
                    {"normalized_regret", row.normalized_regret}});
  json summary = {{"schema", "sweep-summary/1"},
                  {"mode", "sweep"},
                  {"trials", config.trials},
                  {"T", config.env.T},
                  {"normalized_max_min_ratio", result.normalized_max_min_ratio},
                  {"rows", rows}};
  persist_summary(config, summary);
  return csv_path;
}

std::string run_geneprobe(const ExperimentConfig& config) {
  const GeneProbeResult result = geneprobe_experiment(config);
  std::filesystem::create_directories(config.output_dir);

  const std::filesystem::path dir(config.output_dir);
  const std::string csv_path = (dir / "success_rate.csv").string();
  write_text(csv_path, success_csv(result));

  json summary = {{"schema", "geneprobe-summary/1"},
                  {"mode", "geneprobe"},
                  {"policy", result.policy},
                  {"trials", result.series.trials},
                  {"pulls", static_cast<std::int64_t>(result.series.success_rate.size())},
                  {"final_success_rate", result.series.success_rate.empty()
                                             ? 0.0
                                             : result.series.success_rate.back()},
                  {"any_significant", result.series.any_significant},
                  {"time_to_0.9", result.time_to_high < 0
                                      ? json(nullptr)
                                      : json(result.time_to_high)}};
  persist_summary(config, summary);
  return csv_path;
}

}  // namespace sambandit
