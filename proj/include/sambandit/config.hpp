#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sambandit/bandit.hpp"
#include "sambandit/environments.hpp"

namespace sambandit {

/// Solver knobs surfaced in the experiment file.
struct SolverTunables {
  double rel_tol = 1e-8;
  int max_iter = 500;
};

/// Bandit knobs shared by every lasso policy.
struct BanditTunables {
  double eta1 = 0.1;
  double radius = 0.0;  // <= 0 picks the default 2*b*sqrt(sqrt(d))
  double zeta_floor = 1e-3;
  double ols_ridge = 1.0;  // ridge seed for the least-squares baseline
  std::string cadence = "every_round";  // or "doubling"
  SolverTunables solver;

  double resolved_radius(int d, double b) const;
  BanditConfig to_bandit_config(int d, double b) const;
};

/// Probe-selection settings for expression data.
struct GeneProbeSettings {
  std::string dataset;
  bool raw_counts = false;
  int arms_per_round = 0;  // 0 offers every probe each round
  int pulls = 500;
  double alpha = 0.05;
  double reward_noise_sd = 0.0;
};

/// One experiment file: mode, environment, policies, tunables.
///
/// JSON layout mirrors the struct: top-level scalars plus "env", "bandit",
/// "sweep", and "geneprobe" sections. "env.zeta" accepts a scalar (uniform
/// observation probability) or an array of d entries. Unknown keys are
/// rejected so typos cannot silently fall back to defaults.
struct ExperimentConfig {
  std::string mode = "simulate";  // simulate | sweep | geneprobe
  int trials = 20;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::vector<std::string> policies = {"oracle", "sam", "naive_lasso", "ols"};
  SyntheticEnvConfig env;
  BanditTunables bandit;
  std::vector<double> zeta_grid = {0.65, 0.75, 0.9};
  GeneProbeSettings geneprobe;

  void validate() const;

  std::string to_json_text() const;
  static ExperimentConfig from_json_text(const std::string& text);

  static ExperimentConfig load(const std::string& path);
  void save(const std::string& path) const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace sambandit
