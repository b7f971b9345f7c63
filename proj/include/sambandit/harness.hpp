#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sambandit/config.hpp"
#include "sambandit/geneprobe.hpp"

namespace sambandit {

/// One CSV row of a simulation run log.
struct RunLogRecord {
  int trial = 0;
  std::int64_t t = 0;
  std::string policy;
  int chosen_arm = 0;
  double reward = 0.0;
  double regret = 0.0;
  double cumulative_regret = 0.0;
  double eta_t = 0.0;
  double zeta_min_hat = 1.0;
  double beta_l1 = 0.0;
  int solver_iterations = 0;
};

/// Pinned CSV schemas; tests and the plotter key off these exact headers.
inline constexpr const char* kRunLogHeader =
    "trial,t,policy,chosen_arm,reward,regret,cumulative_regret,eta_t,"
    "zeta_min_hat,beta_l1,solver_iterations";
inline constexpr const char* kSweepHeader =
    "zeta,final_regret_mean,final_regret_sd,normalized_regret";
inline constexpr const char* kSuccessHeader = "t,success_rate,trials";

/// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

/// Scale factor zeta_min^2 / sqrt(s0 * T * log(d * T)) used to compare final
/// regret across observation probabilities on a common footing.
double rate_normalization(double zeta_min, int s0, std::int64_t T, int d);

struct PolicySummary {
  double final_regret_mean = 0.0;
  double final_regret_sd = 0.0;
};

struct SimulateResult {
  std::vector<RunLogRecord> records;  // ordered by (trial, t, policy order)
  std::map<std::string, PolicySummary> policy_summaries;
  std::vector<std::uint64_t> trajectory_hashes;  // one per trial
  bool shared_trajectories = true;  // every policy saw the same draws
};

struct SweepRow {
  double zeta = 1.0;
  double final_regret_mean = 0.0;
  double final_regret_sd = 0.0;
  double normalized_regret = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double normalized_max_min_ratio = 1.0;
};

struct GeneProbeResult {
  std::string policy;
  SuccessSeries series;
  std::int64_t time_to_high = -1;  // first 1-based pull with rate >= 0.9
};

/// Pure computation entry points (no filesystem access).
SimulateResult simulate_experiment(const ExperimentConfig& config);
SweepResult sweep_experiment(const ExperimentConfig& config);
GeneProbeResult geneprobe_experiment(const ExperimentConfig& config);

std::string run_log_csv(const std::vector<RunLogRecord>& records);
std::string sweep_csv(const SweepResult& result);
std::string success_csv(const GeneProbeResult& result);

/// Full subcommand bodies: compute, then persist CSV + JSON summary (and a
/// config echo) into config.output_dir. Each returns the run-log/series path.
std::string run_simulate(const ExperimentConfig& config);
std::string run_sweep(const ExperimentConfig& config);
std::string run_geneprobe(const ExperimentConfig& config);

}  // namespace sambandit
