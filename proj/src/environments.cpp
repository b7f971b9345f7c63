#include "sambandit/environments.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstring>
#include <numeric>
#include <vector>

namespace sambandit {

void SyntheticEnvConfig::validate() const {
  if (K < 1) throw ConfigError("env: K must be >= 1");
  if (d < 1) throw ConfigError("env: d must be >= 1");
  if (s0 < 0 || s0 > d) throw ConfigError("env: s0 must be in [0, d]");
  if (!(b > 0.0)) throw ConfigError("env: b must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("env: rho must be in [0, 1)");
  if (!(noise_sd >= 0.0)) throw ConfigError("env: noise_sd must be >= 0");
  if (T < 1) throw ConfigError("env: T must be >= 1");
  if (zeta.size() != d) throw ConfigError("env: zeta must have length d");
  for (Eigen::Index j = 0; j < zeta.size(); ++j)
    if (!(zeta[j] > 0.0 && zeta[j] <= 1.0))
      throw ConfigError("env: zeta entries must be in (0, 1]");
}

Eigen::VectorXd make_beta(int d, int s0, double b, Rng& rng) {
  if (s0 > d) throw ConfigError("make_beta: s0 exceeds d");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  // Partial Fisher-Yates over the index vector picks the support uniformly.
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < s0; ++k) {
    const std::int64_t pick = k + rng.below(d - k);
    std::swap(idx[k], idx[pick]);
    const double mag = b * (0.5 + 0.5 * rng.uniform());
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    beta[idx[k]] = sign * mag;
  }
  return beta;
}

Eigen::MatrixXd toeplitz_sigma(int d, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("toeplitz_sigma: rho must be in [0, 1)");
  Eigen::MatrixXd sigma(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) sigma(i, j) = std::pow(rho, std::abs(i - j));
  return sigma;
}

ContextRound sample_round(const Eigen::MatrixXd& chol_lower,
                          const Eigen::VectorXd& zeta, int K, Rng& rng) {
  const Eigen::Index d = zeta.size();
  ContextRound round;
  round.x.resize(K, d);
  round.u.resize(K, d);
  Eigen::VectorXd g(d);
  for (int i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g[j] = rng.normal();
    round.x.row(i) = (chol_lower * g).transpose();
  }
  for (int i = 0; i < K; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      round.u(i, j) = rng.uniform() < zeta[j] ? 1.0 : 0.0;
  round.z = round.x.cwiseProduct(round.u);
  return round;
}

double reward(const Eigen::VectorXd& x_chosen, const Eigen::VectorXd& beta_star,
              double noise_sd, Rng& rng) {
  return x_chosen.dot(beta_star) + noise_sd * rng.normal();
}

double regret_of(const ContextRound& round, const Eigen::VectorXd& beta_star,
                 int chosen) {
  if (chosen < 0 || chosen >= round.x.rows())
    throw ConfigError("regret_of: chosen arm out of range");
  const Eigen::VectorXd values = round.x * beta_star;
  return values.maxCoeff() - values[chosen];
}

SyntheticEnv::SyntheticEnv(const SyntheticEnvConfig& config, std::uint64_t stream_seed)
    : cfg_(config), rng_(stream_seed) {
  cfg_.validate();
  const Eigen::MatrixXd sigma = toeplitz_sigma(cfg_.d, cfg_.rho);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NumericError("SyntheticEnv: Toeplitz covariance is not positive definite");
  chol_lower_ = llt.matrixL();
  beta_star_ = make_beta(cfg_.d, cfg_.s0, cfg_.b, rng_);
}

void SyntheticEnv::absorb(const double* data, std::size_t n) {
  const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n * sizeof(double); ++i) {
    hash_ ^= bytes[i];
    hash_ *= 1099511628211ULL;
  }
}

ContextRound SyntheticEnv::next_round() {
  ContextRound round = sample_round(chol_lower_, cfg_.zeta, cfg_.K, rng_);
  absorb(round.x.data(), static_cast<std::size_t>(round.x.size()));
  absorb(round.u.data(), static_cast<std::size_t>(round.u.size()));
  return round;
}

double SyntheticEnv::next_noise() {
  const double eps = cfg_.noise_sd * rng_.normal();
  absorb(&eps, 1);
  return eps;
}

double SyntheticEnv::reward_of(const ContextRound& round, int chosen,
                               double noise) const {
  if (chosen < 0 || chosen >= round.x.rows())
    throw ConfigError("reward_of: chosen arm out of range");
  return round.x.row(chosen).dot(beta_star_) + noise;
}

}  // namespace sambandit
