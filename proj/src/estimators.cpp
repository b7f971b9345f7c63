#include "sambandit/estimators.hpp"

#include <string>

namespace sambandit {

SamplingProbEstimate::SamplingProbEstimate(Eigen::Index d, double floor)
    : mean_(Eigen::VectorXd::Ones(d)), floor_(floor) {
  if (d <= 0) throw ConfigError("SamplingProbEstimate: dimension must be positive");
  if (!(floor > 0.0 && floor <= 1.0))
    throw ConfigError("SamplingProbEstimate: floor must be in (0, 1]");
}

void SamplingProbEstimate::update(const Eigen::MatrixXd& mask_round) {
  if (mask_round.cols() != mean_.size())
    throw ConfigError("update_sampling_probs: mask has " +
                      std::to_string(mask_round.cols()) + " columns, expected " +
                      std::to_string(mean_.size()));
  if (mask_round.rows() < 1)
    throw ConfigError("update_sampling_probs: mask needs at least one arm row");
  const Eigen::VectorXd round_mean =
      mask_round.colwise().mean().transpose();
  t_ += 1;
  // zeta_0 = 1 is forgotten at t = 1, so mean_ is exactly the running mean
  // of all t*K mask bits thereafter.
  mean_ += (round_mean - mean_) / static_cast<double>(t_);
}

Eigen::VectorXd SamplingProbEstimate::zeta_hat() const {
  return mean_.cwiseMax(floor_).cwiseMin(1.0);
}

double SamplingProbEstimate::zeta_min() const { return zeta_hat().minCoeff(); }

Eigen::MatrixXd mask_correction_matrix(const Eigen::VectorXd& zeta) {
  Eigen::MatrixXd m = zeta * zeta.transpose();
  m.diagonal() = zeta;
  return m;
}

AdjustedMoments::AdjustedMoments(Eigen::Index d)
    : gram_sum_(Eigen::MatrixXd::Zero(d, d)), cross_sum_(Eigen::VectorXd::Zero(d)) {
  if (d <= 0) throw ConfigError("AdjustedMoments: dimension must be positive");
}

void AdjustedMoments::accumulate(const Eigen::VectorXd& z_chosen, double reward) {
  if (z_chosen.size() != cross_sum_.size())
    throw ConfigError("accumulate: context has dimension " +
                      std::to_string(z_chosen.size()) + ", expected " +
                      std::to_string(cross_sum_.size()));
  gram_sum_.noalias() += z_chosen * z_chosen.transpose();
  cross_sum_.noalias() += z_chosen * reward;
  t_ += 1;
}

void AdjustedMoments::require_history() const {
  if (t_ == 0)
    throw EmptyHistoryError("adjusted moments requested before any round was accumulated");
}

Eigen::MatrixXd AdjustedMoments::adjusted_gram(const SamplingProbEstimate& probs) const {
  return adjusted_gram(probs.zeta_hat());
}

Eigen::MatrixXd AdjustedMoments::adjusted_gram(const Eigen::VectorXd& zeta) const {
  require_history();
  if (zeta.size() != dim())
    throw ConfigError("adjusted_gram: zeta dimension mismatch");
  const Eigen::MatrixXd m = mask_correction_matrix(zeta);
  return (gram_sum_ / static_cast<double>(t_)).cwiseQuotient(m);
}

Eigen::VectorXd AdjustedMoments::adjusted_cross(const SamplingProbEstimate& probs) const {
  return adjusted_cross(probs.zeta_hat());
}

Eigen::VectorXd AdjustedMoments::adjusted_cross(const Eigen::VectorXd& zeta) const {
  require_history();
  if (zeta.size() != dim())
    throw ConfigError("adjusted_cross: zeta dimension mismatch");
  return (cross_sum_ / static_cast<double>(t_)).cwiseQuotient(zeta);
}

}  // namespace sambandit
