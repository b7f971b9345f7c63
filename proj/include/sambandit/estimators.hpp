#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "sambandit/types.hpp"

namespace sambandit {

/// Running estimate of the per-covariate observation probabilities.
///
/// The raw running mean over all mask bits seen so far is kept unclamped so
/// it stays the exact arithmetic mean; reads clamp into [floor, 1].
class SamplingProbEstimate {
public:
  SamplingProbEstimate() = default;
  SamplingProbEstimate(Eigen::Index d, double floor);

  /// Folds one round of masks (one row per arm, entries in {0,1}) into the
  /// running mean: zeta <- zeta + (mean_over_arms - zeta) / t.
  void update(const Eigen::MatrixXd& mask_round);

  /// Clamped probabilities, entries in [floor, 1].
  Eigen::VectorXd zeta_hat() const;
  /// Smallest entry of zeta_hat().
  double zeta_min() const;
  /// Unclamped running mean of the observed mask bits.
  const Eigen::VectorXd& raw_mean() const { return mean_; }

  std::int64_t rounds() const { return t_; }
  double floor() const { return floor_; }
  Eigen::Index dim() const { return mean_.size(); }

private:
  Eigen::VectorXd mean_;
  std::int64_t t_ = 0;
  double floor_ = 1e-3;
};

/// The mask-correction matrix M: M(i,i) = zeta(i), M(i,j) = zeta(i)*zeta(j).
Eigen::MatrixXd mask_correction_matrix(const Eigen::VectorXd& zeta);

/// Accumulated chosen-arm moments: sum of z z^T outer products and of z * r.
/// The raw sums never bake in a zeta estimate, so the adjusted moments can be
/// formed with the current estimate at any time.
class AdjustedMoments {
public:
  AdjustedMoments() = default;
  explicit AdjustedMoments(Eigen::Index d);

  void accumulate(const Eigen::VectorXd& z_chosen, double reward);

  /// Gamma_miss = ((1/t) * gram_sum) elementwise-divided by M(zeta).
  /// Symmetric by construction; may be indefinite.
  Eigen::MatrixXd adjusted_gram(const SamplingProbEstimate& probs) const;
  /// Same, against known observation probabilities.
  Eigen::MatrixXd adjusted_gram(const Eigen::VectorXd& zeta) const;

  /// gamma_miss = ((1/t) * cross_sum) elementwise-divided by zeta.
  Eigen::VectorXd adjusted_cross(const SamplingProbEstimate& probs) const;
  /// Same, against known observation probabilities.
  Eigen::VectorXd adjusted_cross(const Eigen::VectorXd& zeta) const;

  const Eigen::MatrixXd& gram_sum() const { return gram_sum_; }
  const Eigen::VectorXd& cross_sum() const { return cross_sum_; }
  std::int64_t rounds() const { return t_; }
  Eigen::Index dim() const { return cross_sum_.size(); }

private:
  void require_history() const;

  Eigen::MatrixXd gram_sum_;
  Eigen::VectorXd cross_sum_;
  std::int64_t t_ = 0;
};

}  // namespace sambandit
