#include "sambandit/bandit.hpp"

#include <cmath>

namespace sambandit {

int select_arm(const Eigen::MatrixXd& observed, const Eigen::VectorXd& zeta_hat,
               const Eigen::VectorXd& beta_hat) {
  if (observed.rows() < 1) throw ConfigError("select_arm: need at least one arm");
  if (observed.cols() != zeta_hat.size() || observed.cols() != beta_hat.size())
    throw ConfigError("select_arm: dimension mismatch");
  const Eigen::VectorXd weighted = beta_hat.cwiseQuotient(zeta_hat);
  int best = 0;
  double best_score = observed.row(0).dot(weighted);
  for (int i = 1; i < observed.rows(); ++i) {
    const double score = observed.row(i).dot(weighted);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

double regularization_schedule(double eta1, std::int64_t t, double zeta_min, int d) {
  if (!(zeta_min > 0.0)) throw ConfigError("regularization_schedule: zeta_min must be > 0");
  if (t < 1) throw ConfigError("regularization_schedule: t must be >= 1");
  if (d < 1) throw ConfigError("regularization_schedule: d must be >= 1");
  const double tz = static_cast<double>(t) * zeta_min * zeta_min;
  const double log_term = std::max(4.0 * std::log(tz), 0.0);
  return eta1 * std::sqrt((log_term + std::log(static_cast<double>(d))) / tz);
}

SamBandit::SamBandit(const BanditConfig& config)
    : cfg_(config),
      beta_hat_(Eigen::VectorXd::Zero(config.d)),
      probs_(config.d, config.zeta_floor),
      moments_(config.d) {
  if (config.d < 1) throw ConfigError("SamBandit: d must be >= 1");
  if (!(config.radius > 0.0)) throw ConfigError("SamBandit: radius must be positive");
  if (config.eta1 < 0.0) throw ConfigError("SamBandit: eta1 must be >= 0");
}

bool SamBandit::should_resolve(std::int64_t t) const {
  if (cfg_.cadence == ResolveCadence::EveryRound) return true;
  return (t & (t - 1)) == 0;  // powers of two
}

RoundOutcome SamBandit::step(const ContextRound& round, const RewardFn& reward_fn) {
  probs_.update(round.u);
  // Selection uses the estimate from round t-1; zeta is already current.
  const Eigen::VectorXd zeta = probs_.zeta_hat();
  const int arm = select_arm(round.z, zeta, beta_hat_);

  const RewardFeedback fb = reward_fn(arm);
  if (!std::isfinite(fb.reward))
    throw NumericError("SamBandit::step: non-finite reward from environment");

  t_ += 1;
  moments_.accumulate(round.z.row(arm).transpose(), fb.reward);
  const double eta_t =
      regularization_schedule(cfg_.eta1, t_, probs_.zeta_min(), cfg_.d);

  RoundOutcome out;
  out.chosen_arm = arm;
  out.reward = fb.reward;
  out.regret = fb.regret;
  out.eta_t = eta_t;
  out.zeta_min_hat = probs_.zeta_min();

  if (should_resolve(t_)) {
    LassoProblem problem;
    if (cfg_.adjust_moments) {
      problem.gamma_mat = moments_.adjusted_gram(probs_);
      problem.gamma_vec = moments_.adjusted_cross(probs_);
    } else {
      problem.gamma_mat = moments_.gram_sum() / static_cast<double>(t_);
      problem.gamma_vec = moments_.cross_sum() / static_cast<double>(t_);
    }
    problem.eta = eta_t;
    problem.radius = cfg_.radius;

    SolveOptions opts = cfg_.solver;
    for (int attempt = 0;; ++attempt) {
      try {
        SolverReport report = solve(problem, beta_hat_, opts);
        // A net ascent over the whole trace also means L was too small.
        if (!report.objective_trace.empty() &&
            report.final_objective >
                report.objective_trace.front() + 1e-9 * (1.0 + std::abs(report.objective_trace.front()))) {
          opts.lipschitz = 2.0 * report.lipschitz;
          if (attempt < 6) continue;
        }
        beta_hat_ = report.beta;
        out.solver_iterations = report.iterations;
        break;
      } catch (const DivergenceError& err) {
        if (attempt >= 6) throw;
        opts.lipschitz = 2.0 * err.lipschitz();
      }
    }
  }
  out.beta_l1 = beta_hat_.lpNorm<1>();
  return out;
}

OlsBandit::OlsBandit(int d, double ridge, double zeta_floor)
    : beta_hat_(Eigen::VectorXd::Zero(d)),
      a_inv_(Eigen::MatrixXd::Identity(d, d) / ridge),
      b_(Eigen::VectorXd::Zero(d)),
      probs_(d, zeta_floor) {
  if (!(ridge > 0.0)) throw ConfigError("OlsBandit: ridge must be positive");
}

RoundOutcome OlsBandit::step(const ContextRound& round, const RewardFn& reward_fn) {
  probs_.update(round.u);
  const Eigen::VectorXd zeta = probs_.zeta_hat();
  const int arm = select_arm(round.z, zeta, beta_hat_);

  const RewardFeedback fb = reward_fn(arm);
  if (!std::isfinite(fb.reward))
    throw NumericError("OlsBandit::step: non-finite reward from environment");

  const Eigen::VectorXd w = round.z.row(arm).transpose().cwiseQuotient(zeta);
  // Sherman-Morrison update of (A + w w^T)^-1.
  const Eigen::VectorXd aw = a_inv_ * w;
  a_inv_.noalias() -= (aw * aw.transpose()) / (1.0 + w.dot(aw));
  b_.noalias() += w * fb.reward;
  beta_hat_.noalias() = a_inv_ * b_;

  RoundOutcome out;
  out.chosen_arm = arm;
  out.reward = fb.reward;
  out.regret = fb.regret;
  out.zeta_min_hat = probs_.zeta_min();
  out.beta_l1 = beta_hat_.lpNorm<1>();
  return out;
}

RoundOutcome OraclePolicy::step(const ContextRound& round,
                                const RewardFn& reward_fn) const {
  Eigen::Index arm = 0;
  (round.x * beta_star_).maxCoeff(&arm);
  const RewardFeedback fb = reward_fn(static_cast<int>(arm));
  RoundOutcome out;
  out.chosen_arm = static_cast<int>(arm);
  out.reward = fb.reward;
  out.regret = fb.regret;
  out.beta_l1 = beta_star_.lpNorm<1>();
  return out;
}

}  // namespace sambandit
