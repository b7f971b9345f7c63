#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "sambandit/types.hpp"

namespace sambandit {

struct SyntheticEnvConfig {
  int K = 20;
  int d = 200;
  int s0 = 14;           // ~ sqrt(d) rounded
  double b = 1.0;        // max |beta*| magnitude
  double rho = 0.5;      // Toeplitz correlation
  double noise_sd = 0.05;
  Eigen::VectorXd zeta;  // per-covariate observation probability
  std::int64_t T = 2000;
  std::uint64_t seed = 1;

  void validate() const;
};

/// One round of contexts: true K x d matrix, {0,1} mask, observed z = x . u.
struct ContextRound {
  Eigen::MatrixXd x;
  Eigen::MatrixXd u;
  Eigen::MatrixXd z;
};

/// Sparse parameter with exactly s0 nonzeros at uniform positions,
/// magnitudes uniform in [b/2, b] with random signs.
Eigen::VectorXd make_beta(int d, int s0, double b, Rng& rng);

/// Sigma(i,j) = rho^|i-j|.
Eigen::MatrixXd toeplitz_sigma(int d, double rho);

/// Rows i.i.d. N(0, Sigma) via a precomputed Cholesky factor; masks
/// Bernoulli(zeta_j) per entry.
ContextRound sample_round(const Eigen::MatrixXd& chol_lower,
                          const Eigen::VectorXd& zeta, int K, Rng& rng);

/// Reward of the pulled arm from its true context: x . beta* + N(0, sd^2).
double reward(const Eigen::VectorXd& x_chosen, const Eigen::VectorXd& beta_star,
              double noise_sd, Rng& rng);

/// max_i x_i . beta* - x_chosen . beta*; always >= 0.
double regret_of(const ContextRound& round, const Eigen::VectorXd& beta_star,
                 int chosen);

/// Owns the Cholesky factor and per-trial generator for a synthetic run.
class SyntheticEnv {
public:
  SyntheticEnv(const SyntheticEnvConfig& config, std::uint64_t stream_seed);

  const Eigen::VectorXd& beta_star() const { return beta_star_; }
  ContextRound next_round();
  /// Per-round noise draw, shared across policies replaying the same stream.
  double next_noise();
  double reward_of(const ContextRound& round, int chosen, double noise) const;

  /// FNV-1a hash over every sampled value, for shared-trajectory checks.
  std::uint64_t trajectory_hash() const { return hash_; }

private:
  void absorb(const double* data, std::size_t n);

  SyntheticEnvConfig cfg_;
  Eigen::MatrixXd chol_lower_;
  Eigen::VectorXd beta_star_;
  Rng rng_;
  std::uint64_t hash_ = 1469598103934665603ULL;
};

}  // namespace sambandit
