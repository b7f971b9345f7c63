#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "sambandit/environments.hpp"

using namespace sambandit;

namespace {

SyntheticEnvConfig small_config() {
  SyntheticEnvConfig cfg;
  cfg.K = 3;
  cfg.d = 6;
  cfg.s0 = 2;
  cfg.b = 1.0;
  cfg.rho = 0.5;
  cfg.noise_sd = 0.05;
  cfg.T = 10;
  cfg.zeta = Eigen::VectorXd::Constant(6, 0.8);
  return cfg;
}

}  // namespace

TEST_CASE("make_beta: empty support gives the zero vector") {
  Rng rng(1);
  CHECK(make_beta(8, 0, 1.0, rng) == Eigen::VectorXd::Zero(8));
}

TEST_CASE("make_beta: support size and magnitude bounds") {
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 12, s0 = 5;
    const double b = 2.5;
    const Eigen::VectorXd beta = make_beta(d, s0, b, rng);
    int nonzeros = 0;
    for (int j = 0; j < d; ++j) {
      if (beta[j] == 0.0) continue;
      ++nonzeros;
      CHECK(std::abs(beta[j]) >= b / 2);
      CHECK(std::abs(beta[j]) <= b);
    }
    CHECK(nonzeros == s0);
  }
}

TEST_CASE("make_beta: support positions are uniform (chi-square)") {
  Rng rng(11);
  const int d = 10, s0 = 2, draws = 10000;
  std::vector<int> counts(d, 0);
  for (int rep = 0; rep < draws; ++rep) {
    const Eigen::VectorXd beta = make_beta(d, s0, 1.0, rng);
    for (int j = 0; j < d; ++j)
      if (beta[j] != 0.0) ++counts[j];
  }
  const double expected = double(draws) * s0 / d;
  double chi2 = 0.0;
  for (int j = 0; j < d; ++j) {
    const double delta = counts[j] - expected;
    chi2 += delta * delta / expected;
  }
  // dof = 9, upper 0.1% point.
  CHECK(chi2 <= 27.88);
}

TEST_CASE("make_beta: rejects support larger than the dimension") {
  Rng rng(3);
  CHECK_THROWS_AS(make_beta(4, 5, 1.0, rng), ConfigError);
}

TEST_CASE("toeplitz_sigma: zero correlation is the identity") {
  CHECK(toeplitz_sigma(5, 0.0) == Eigen::MatrixXd::Identity(5, 5));
}

TEST_CASE("toeplitz_sigma: 2x2 entries and eigenvalues") {
  const Eigen::MatrixXd sigma = toeplitz_sigma(2, 0.5);
  CHECK(sigma(0, 0) == 1.0);
  CHECK(sigma(0, 1) == 0.5);
  CHECK(sigma(1, 0) == 0.5);
  CHECK(sigma(1, 1) == 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  CHECK(eig.eigenvalues()[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(eig.eigenvalues()[1] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("toeplitz_sigma: Cholesky factor reconstructs the matrix") {
  const Eigen::MatrixXd sigma = toeplitz_sigma(8, 0.6);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  REQUIRE(llt.info() == Eigen::Success);
  const Eigen::MatrixXd l = llt.matrixL();
  CHECK(((l * l.transpose()) - sigma).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("toeplitz_sigma: rejects correlations outside [0, 1)") {
  CHECK_THROWS_AS(toeplitz_sigma(3, 1.0), ConfigError);
  CHECK_THROWS_AS(toeplitz_sigma(3, -0.1), ConfigError);
}

TEST_CASE("sample_round: full observation passes contexts through untouched") {
  Rng rng(4);
  const Eigen::MatrixXd chol = Eigen::MatrixXd::Identity(5, 5);
  const ContextRound round =
      sample_round(chol, Eigen::VectorXd::Ones(5), 4, rng);
  CHECK(round.u == Eigen::MatrixXd::Ones(4, 5));
  CHECK(round.z == round.x);
}

TEST_CASE("sample_round: independent coordinates match the identity covariance") {
  Rng rng(9);
  const int d = 4, n = 100000;
  const Eigen::MatrixXd chol = Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd zeta = Eigen::VectorXd::Ones(d);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (int rep = 0; rep < n; ++rep) {
    const ContextRound round = sample_round(chol, zeta, 1, rng);
    const Eigen::VectorXd x = round.x.row(0);
    second += x * x.transpose();
    mean += x;
  }
  second /= n;
  mean /= n;
  const double diag_tol = 3.0 * std::sqrt(2.0 / n);
  const double off_tol = 3.0 * std::sqrt(1.0 / n);
  for (int i = 0; i < d; ++i) {
    CHECK(std::abs(mean[i]) <= off_tol);
    for (int j = 0; j < d; ++j) {
      const double target = i == j ? 1.0 : 0.0;
      CHECK(std::abs(second(i, j) - target) <= (i == j ? diag_tol : off_tol));
    }
  }
}

TEST_CASE("sample_round: mask frequencies match the observation probabilities") {
  Rng rng(14);
  const int d = 4, K = 2, n = 20000;
  Eigen::VectorXd zeta(d);
  zeta << 0.9, 0.6, 0.3, 0.8;
  const Eigen::MatrixXd chol = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd seen = Eigen::VectorXd::Zero(d);
  for (int rep = 0; rep < n; ++rep) {
    const ContextRound round = sample_round(chol, zeta, K, rng);
    seen += round.u.colwise().sum().transpose();
  }
  for (int j = 0; j < d; ++j) {
    const double freq = seen[j] / (double(n) * K);
    const double tol = 3.0 * std::sqrt(zeta[j] * (1.0 - zeta[j]) / (double(n) * K));
    CHECK(std::abs(freq - zeta[j]) <= tol);
  }
}

TEST_CASE("sample_round: rescaled observations are unbiased for the contexts") {
  Rng rng(21);
  const int d = 3, n = 100000;
  const double zeta_val = 0.7;
  const Eigen::MatrixXd chol =
      Eigen::LLT<Eigen::MatrixXd>(toeplitz_sigma(d, 0.5)).matrixL();
  const Eigen::VectorXd zeta = Eigen::VectorXd::Constant(d, zeta_val);
  Eigen::VectorXd gap = Eigen::VectorXd::Zero(d);
  for (int rep = 0; rep < n; ++rep) {
    const ContextRound round = sample_round(chol, zeta, 1, rng);
    gap += (round.z.row(0) / zeta_val - round.x.row(0)).transpose();
  }
  gap /= n;
  // Paired difference x (u/zeta - 1): variance (1 - zeta)/zeta per draw.
  const double tol = 3.0 * std::sqrt((1.0 - zeta_val) / (zeta_val * n));
  for (int j = 0; j < d; ++j) CHECK(std::abs(gap[j]) <= tol);
}

TEST_CASE("reward: noiseless case is the exact inner product") {
  Rng rng(5);
  Eigen::VectorXd x(3), beta(3);
  x << 0.3, -1.2, 0.8;
  beta << 1.0, 0.5, -2.0;
  CHECK(reward(x, beta, 0.0, rng) == x.dot(beta));
}

TEST_CASE("reward: noise variance matches the configured scale") {
  Rng rng(6);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2), beta = Eigen::VectorXd::Zero(2);
  const double sd = 0.3;
  const int n = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int rep = 0; rep < n; ++rep) {
    const double r = reward(x, beta, sd, rng);
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(var - sd * sd) <= 3.0 * sd * sd * std::sqrt(2.0 / n));
}

TEST_CASE("regret_of: best arm has zero regret, others pay the value gap") {
  ContextRound round;
  round.x.resize(2, 1);
  round.x << 1.0, 0.4;
  round.u = Eigen::MatrixXd::Ones(2, 1);
  round.z = round.x;
  Eigen::VectorXd beta(1);
  beta << 2.0;
  CHECK(regret_of(round, beta, 0) == 0.0);
  CHECK(regret_of(round, beta, 1) == doctest::Approx(1.2).epsilon(1e-15));
}

TEST_CASE("regret_of: agrees with direct enumeration on random instances") {
  Rng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    const int k = 2 + int(rng.below(5)), d = 1 + int(rng.below(4));
    ContextRound round;
    round.x.resize(k, d);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < d; ++j) round.x(i, j) = rng.normal();
    round.u = Eigen::MatrixXd::Ones(k, d);
    round.z = round.x;
    Eigen::VectorXd beta(d);
    for (int j = 0; j < d; ++j) beta[j] = rng.normal();
    double best = -1e300;
    for (int i = 0; i < k; ++i) best = std::max(best, round.x.row(i).dot(beta));
    for (int i = 0; i < k; ++i) {
      const double expected = best - round.x.row(i).dot(beta);
      CHECK(regret_of(round, beta, i) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(regret_of(round, beta, i) >= 0.0);
    }
  }
  ContextRound round;
  round.x = Eigen::MatrixXd::Ones(2, 2);
  round.u = round.x;
  round.z = round.x;
  CHECK_THROWS_AS(regret_of(round, Eigen::VectorXd::Ones(2), 2), ConfigError);
}

TEST_CASE("synthetic env: identical stream seeds replay identical trajectories") {
  const SyntheticEnvConfig cfg = small_config();
  SyntheticEnv a(cfg, 42), b(cfg, 42);
  CHECK(a.beta_star() == b.beta_star());
  for (int t = 0; t < 5; ++t) {
    const ContextRound ra = a.next_round(), rb = b.next_round();
    CHECK(ra.x == rb.x);
    CHECK(ra.u == rb.u);
    CHECK(ra.z == rb.z);
    CHECK(a.next_noise() == b.next_noise());
    CHECK(ra.z == ra.x.cwiseProduct(ra.u));
  }
  CHECK(a.trajectory_hash() == b.trajectory_hash());

  SyntheticEnv c(cfg, 43);
  for (int t = 0; t < 5; ++t) {
    c.next_round();
    c.next_noise();
  }
  CHECK(c.trajectory_hash() != a.trajectory_hash());
}

TEST_CASE("synthetic env: reward uses the true context of the pulled arm") {
  const SyntheticEnvConfig cfg = small_config();
  SyntheticEnv env(cfg, 17);
  const ContextRound round = env.next_round();
  const double noise = env.next_noise();
  for (int arm = 0; arm < cfg.K; ++arm) {
    const double expected = round.x.row(arm).dot(env.beta_star()) + noise;
    CHECK(env.reward_of(round, arm, noise) == doctest::Approx(expected).epsilon(1e-15));
  }
  CHECK_THROWS_AS(env.reward_of(round, cfg.K, noise), ConfigError);
}

TEST_CASE("synthetic env config: validation rejects out-of-range fields") {
  const SyntheticEnvConfig base = small_config();
  CHECK_NOTHROW(base.validate());

  auto broken = [&](auto&& mutate) {
    SyntheticEnvConfig cfg = base;
    mutate(cfg);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  };
  broken([](SyntheticEnvConfig& c) { c.K = 0; });
  broken([](SyntheticEnvConfig& c) { c.d = 0; });
  broken([](SyntheticEnvConfig& c) { c.s0 = c.d + 1; });
  broken([](SyntheticEnvConfig& c) { c.s0 = -1; });
  broken([](SyntheticEnvConfig& c) { c.b = 0.0; });
  broken([](SyntheticEnvConfig& c) { c.rho = 1.0; });
  broken([](SyntheticEnvConfig& c) { c.rho = -0.2; });
  broken([](SyntheticEnvConfig& c) { c.noise_sd = -0.1; });
  broken([](SyntheticEnvConfig& c) { c.T = 0; });
  broken([](SyntheticEnvConfig& c) { c.zeta = Eigen::VectorXd::Ones(c.d - 1); });
  broken([](SyntheticEnvConfig& c) { c.zeta[2] = 0.0; });
  broken([](SyntheticEnvConfig& c) { c.zeta[0] = 1.5; });
}
