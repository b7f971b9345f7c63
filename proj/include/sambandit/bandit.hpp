#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "sambandit/environments.hpp"
#include "sambandit/estimators.hpp"
#include "sambandit/solver.hpp"

namespace sambandit {

enum class ResolveCadence { EveryRound, Doubling };

struct BanditConfig {
  int d = 0;
  double eta1 = 0.1;
  double radius = 1.0;  // l1 ball radius R
  double zeta_floor = 1e-3;
  /// When false the mask correction is dropped (M = all-ones, no division
  /// by zeta in the cross moment): the unadjusted lasso baseline.
  bool adjust_moments = true;
  ResolveCadence cadence = ResolveCadence::EveryRound;
  SolveOptions solver;
};

struct RoundOutcome {
  int chosen_arm = 0;
  double reward = 0.0;
  double regret = 0.0;
  double eta_t = 0.0;
  double beta_l1 = 0.0;
  double zeta_min_hat = 1.0;
  int solver_iterations = 0;
};

/// What the environment reports back for a pulled arm. The regret is filled
/// by environments that know beta*; otherwise zero.
struct RewardFeedback {
  double reward = 0.0;
  double regret = 0.0;
};

using RewardFn = std::function<RewardFeedback(int arm)>;

/// Plug-in policy: smallest index maximizing (z_i ./ zeta) . beta.
int select_arm(const Eigen::MatrixXd& observed, const Eigen::VectorXd& zeta_hat,
               const Eigen::VectorXd& beta_hat);

/// eta_t = eta1 * sqrt((max(4 log(t z^2), 0) + log d) / (t z^2)).
/// The log term is clamped at zero while t z^2 < 1 so early values stay real.
double regularization_schedule(double eta1, std::int64_t t, double zeta_min, int d);

/// The SAM decision loop. With adjust_moments = false this is the plain
/// SA lasso bandit run blind on the masked contexts.
class SamBandit {
public:
  explicit SamBandit(const BanditConfig& config);

  RoundOutcome step(const ContextRound& round, const RewardFn& reward_fn);

  const Eigen::VectorXd& beta_hat() const { return beta_hat_; }
  const SamplingProbEstimate& probs() const { return probs_; }
  const AdjustedMoments& moments() const { return moments_; }
  std::int64_t rounds() const { return t_; }

private:
  bool should_resolve(std::int64_t t) const;

  BanditConfig cfg_;
  Eigen::VectorXd beta_hat_;
  SamplingProbEstimate probs_;
  AdjustedMoments moments_;
  std::int64_t t_ = 0;
};

/// Ridge least squares on (z ./ zeta, reward) pairs, updated by rank-one
/// downdates of the inverse; selection by the same plug-in rule.
class OlsBandit {
public:
  OlsBandit(int d, double ridge, double zeta_floor);

  RoundOutcome step(const ContextRound& round, const RewardFn& reward_fn);

  const Eigen::VectorXd& beta_hat() const { return beta_hat_; }
  const SamplingProbEstimate& probs() const { return probs_; }

private:
  Eigen::VectorXd beta_hat_;
  Eigen::MatrixXd a_inv_;
  Eigen::VectorXd b_;
  SamplingProbEstimate probs_;
};

/// Plays argmax_i x_i . beta* on the true contexts; regret is identically 0.
class OraclePolicy {
public:
  explicit OraclePolicy(Eigen::VectorXd beta_star) : beta_star_(std::move(beta_star)) {}

  RoundOutcome step(const ContextRound& round, const RewardFn& reward_fn) const;

private:
  Eigen::VectorXd beta_star_;
};

}  // namespace sambandit
