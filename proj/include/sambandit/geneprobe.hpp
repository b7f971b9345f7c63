#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sambandit/bandit.hpp"
#include "sambandit/types.hpp"

namespace sambandit {

/// Log-expression matrix, columns grouped class-1 first then class-2.
/// Exact zeros are missing entries throughout this module.
struct ExpressionDataset {
  Eigen::MatrixXd values;  // n_probes x (m1 + m2)
  int m1 = 0;
  int m2 = 0;
  std::vector<std::string> probe_ids;

  int probes() const { return static_cast<int>(values.rows()); }
  int samples() const { return m1 + m2; }
};

struct WelchResult {
  double t_stat = 0.0;
  double dof = 1.0;
  double p_value = 1.0;
};

/// Two-sided P(|T| >= |t|) for Student's t with the given degrees of
/// freedom, via the regularized incomplete beta function.
double student_t_tail(double t, double dof);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// Welch's two-sample t-test with unbiased variances and
/// Welch-Satterthwaite degrees of freedom. Zero pooled variance with equal
/// means yields p = 1; with unequal means the p-value floor.
WelchResult welch_t(const std::vector<double>& x1, const std::vector<double>& x2);

/// log((1 - p) / p) with p clamped into [1e-12, 1 - 1e-12].
double logit_reward(double p_value);

/// Tab-separated file: header row "id<TAB>label...<TAB>label", one row per
/// probe. Exactly two distinct labels; first-seen label becomes class 1.
/// With log1p_transform the values are mapped x -> log(1 + x), which keeps
/// zeros as missing markers.
ExpressionDataset load_expression(const std::string& path, bool log1p_transform = false);

/// Writes the dataset back in the load_expression format.
void write_expression(const ExpressionDataset& dataset, const std::string& path);

struct ProbeSelectionConfig {
  /// Probes offered per round; 0 means every probe every round.
  int arms_per_round = 50;
  std::int64_t pulls = 500;
  double alpha = 0.05;
  /// Optional additive Gaussian noise on top of the bootstrap reward.
  double reward_noise_sd = 0.0;
  BanditConfig bandit;
  double ols_ridge = 1.0;
};

/// Full-data Welch p-value per probe, zeros dropped as missing.
std::vector<double> full_data_p_values(const ExpressionDataset& dataset);

/// Bootstrap reward for one probe: resample each class with replacement,
/// drop missing entries, Welch, logit of the clamped p-value.
double probe_reward(const ExpressionDataset& dataset, int probe_index, Rng& rng,
                    double noise_sd = 0.0);

struct SuccessSeries {
  std::vector<double> success_rate;  // indexed by pull t-1
  int trials = 0;
  /// True when at least one probe is significant on the full data.
  bool any_significant = true;
};

/// Runs the bandit loop over the expression data with the chosen policy
/// ("sam", "naive_lasso" or "ols"); the oracle baseline is unsupported here
/// because true contexts are never observed. Returns the per-pull fraction
/// of trials whose chosen probe is significant on the full data.
SuccessSeries run_probe_selection(const ExpressionDataset& dataset,
                                  const ProbeSelectionConfig& config,
                                  const std::string& policy, int trials,
                                  std::uint64_t seed);

}  // namespace sambandit
