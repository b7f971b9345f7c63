#include <doctest.h>

#include <random>

#include "sambandit/estimators.hpp"

using namespace sambandit;

TEST_CASE("sampling probs: all-ones masks keep zeta at one") {
  SamplingProbEstimate probs(3, 1e-3);
  probs.update(Eigen::MatrixXd::Ones(4, 3));
  CHECK(probs.zeta_hat() == Eigen::VectorXd::Ones(3));
  CHECK(probs.rounds() == 1);
}

TEST_CASE("sampling probs: mean of two mask bits") {
  SamplingProbEstimate probs(1, 1e-3);
  Eigen::MatrixXd mask(2, 1);
  mask << 1, 0;
  probs.update(mask);
  CHECK(probs.raw_mean()[0] == 0.5);
  CHECK(probs.zeta_hat()[0] == 0.5);
}

TEST_CASE("sampling probs: running mean matches batch mean of all bits") {
  std::mt19937_64 gen(11);
  std::bernoulli_distribution bit(0.4);
  const int k = 3, d = 5, rounds = 50;
  SamplingProbEstimate probs(d, 1e-3);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(d);
  for (int t = 0; t < rounds; ++t) {
    Eigen::MatrixXd mask(k, d);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < d; ++j) mask(i, j) = bit(gen) ? 1.0 : 0.0;
    probs.update(mask);
    total += mask.colwise().sum().transpose();
  }
  const Eigen::VectorXd batch = total / double(k * rounds);
  CHECK((probs.raw_mean() - batch).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("sampling probs: Bernoulli masks recover their rate") {
  std::mt19937_64 gen(5);
  std::bernoulli_distribution bit(0.7);
  const int k = 3, d = 4, rounds = 10000;
  SamplingProbEstimate probs(d, 1e-3);
  Eigen::MatrixXd mask(k, d);
  for (int t = 0; t < rounds; ++t) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < d; ++j) mask(i, j) = bit(gen) ? 1.0 : 0.0;
    probs.update(mask);
  }
  const double se = std::sqrt(0.7 * 0.3 / double(k * rounds));
  for (int j = 0; j < d; ++j)
    CHECK(std::abs(probs.raw_mean()[j] - 0.7) <= 3.0 * se);
}

TEST_CASE("sampling probs: floor clamps unobserved covariates") {
  SamplingProbEstimate probs(2, 1e-3);
  for (int t = 0; t < 20; ++t) probs.update(Eigen::MatrixXd::Zero(3, 2));
  CHECK(probs.raw_mean()[0] == 0.0);
  CHECK(probs.zeta_hat()[0] == 1e-3);
  CHECK(probs.zeta_min() == 1e-3);
}

TEST_CASE("sampling probs: dimension mismatch is rejected") {
  SamplingProbEstimate probs(3, 1e-3);
  CHECK_THROWS_AS(probs.update(Eigen::MatrixXd::Ones(2, 4)), ConfigError);
}

TEST_CASE("mask correction matrix: structure and range") {
  Eigen::VectorXd zeta(3);
  zeta << 0.5, 0.7, 1.0;
  const Eigen::MatrixXd m = mask_correction_matrix(zeta);
  CHECK(m(0, 0) == 0.5);
  CHECK(m(1, 1) == 0.7);
  CHECK(m(0, 1) == 0.5 * 0.7);
  CHECK(m == m.transpose().eval());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(m(i, j) > 0.0);
      CHECK(m(i, j) <= 1.0);
      CHECK(m(i, i) >= m(i, j));  // zeta_i >= zeta_i * zeta_j when zeta <= 1
    }
}

TEST_CASE("moments: single basis-vector accumulation") {
  AdjustedMoments moments(3);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
  z[0] = 1.0;
  moments.accumulate(z, 2.0);
  Eigen::MatrixXd expected_gram = Eigen::MatrixXd::Zero(3, 3);
  expected_gram(0, 0) = 1.0;
  CHECK(moments.gram_sum() == expected_gram);
  Eigen::VectorXd expected_cross = Eigen::VectorXd::Zero(3);
  expected_cross[0] = 2.0;
  CHECK(moments.cross_sum() == expected_cross);
  CHECK(moments.rounds() == 1);
}

TEST_CASE("moments: accumulation order does not change the sums") {
  Eigen::VectorXd z1(2), z2(2);
  z1 << 0.3, -1.2;
  z2 << 2.0, 0.7;
  AdjustedMoments a(2), b(2);
  a.accumulate(z1, 1.5);
  a.accumulate(z2, -0.25);
  b.accumulate(z2, -0.25);
  b.accumulate(z1, 1.5);
  CHECK(a.gram_sum() == b.gram_sum());
  CHECK(a.cross_sum() == b.cross_sum());
}

TEST_CASE("moments: incremental sums match batch recomputation") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = 6, rounds = 30;
  AdjustedMoments moments(d);
  Eigen::MatrixXd history(rounds, d);
  Eigen::VectorXd rewards(rounds);
  for (int t = 0; t < rounds; ++t) {
    for (int j = 0; j < d; ++j) history(t, j) = normal(gen);
    rewards[t] = normal(gen);
    moments.accumulate(history.row(t).transpose(), rewards[t]);
  }
  const Eigen::MatrixXd batch_gram = history.transpose() * history / double(rounds);
  const Eigen::VectorXd batch_cross = history.transpose() * rewards / double(rounds);
  CHECK((moments.gram_sum() / double(rounds) - batch_gram).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((moments.cross_sum() / double(rounds) - batch_cross).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("adjusted gram: all-ones zeta leaves raw moments untouched") {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = 4;
  AdjustedMoments moments(d);
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd z(d);
    for (int j = 0; j < d; ++j) z[j] = normal(gen);
    moments.accumulate(z, normal(gen));
  }
  SamplingProbEstimate probs(d, 1e-3);
  probs.update(Eigen::MatrixXd::Ones(2, d));
  CHECK(moments.adjusted_gram(probs) == (moments.gram_sum() / 5.0).eval());
  CHECK(moments.adjusted_cross(probs) == (moments.cross_sum() / 5.0).eval());
}

TEST_CASE("adjusted gram: worked two-round example") {
  AdjustedMoments moments(2);
  Eigen::VectorXd z1(2), z2(2);
  z1 << 1, 0;
  z2 << 0, 2;
  moments.accumulate(z1, 0.0);
  moments.accumulate(z2, 0.0);
  const Eigen::VectorXd zeta = Eigen::VectorXd::Constant(2, 0.5);
  const Eigen::MatrixXd gamma = moments.adjusted_gram(zeta);
  CHECK(gamma(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma(1, 1) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(gamma(0, 1) == 0.0);
  CHECK(gamma(1, 0) == 0.0);
}

TEST_CASE("adjusted cross: one-dimensional direct evaluation") {
  AdjustedMoments moments(1);
  moments.accumulate(Eigen::VectorXd::Constant(1, 0.5), 2.0);
  const Eigen::VectorXd zeta = Eigen::VectorXd::Constant(1, 0.5);
  CHECK(moments.adjusted_cross(zeta)[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("adjusted gram: empty history and dimension mismatch are rejected") {
  AdjustedMoments moments(2);
  const Eigen::VectorXd zeta = Eigen::VectorXd::Constant(2, 0.5);
  CHECK_THROWS_AS(moments.adjusted_gram(zeta), EmptyHistoryError);
  CHECK_THROWS_AS(moments.adjusted_cross(zeta), EmptyHistoryError);
  moments.accumulate(Eigen::VectorXd::Ones(2), 1.0);
  CHECK_THROWS_AS(moments.adjusted_gram(Eigen::VectorXd::Ones(3)), ConfigError);
}

TEST_CASE("adjusted gram: mirrored entries are exactly equal") {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution bit(0.6);
  const int d = 5;
  AdjustedMoments moments(d);
  SamplingProbEstimate probs(d, 1e-3);
  for (int t = 0; t < 12; ++t) {
    Eigen::MatrixXd mask(2, d);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < d; ++j) mask(i, j) = bit(gen) ? 1.0 : 0.0;
    probs.update(mask);
    Eigen::VectorXd z(d);
    for (int j = 0; j < d; ++j) z[j] = mask(0, j) * normal(gen);
    moments.accumulate(z, normal(gen));
  }
  const Eigen::MatrixXd gamma = moments.adjusted_gram(probs);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) CHECK(gamma(i, j) == gamma(j, i));
}

TEST_CASE("adjusted moments: small-scale unbiasedness under known zeta") {
  // Monte-Carlo mean of the adjusted gram over i.i.d. draws approaches the
  // true covariance; d kept small here, the full-size check lives in the
  // acceptance suite.
  std::mt19937_64 gen(23);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution bit(0.7);
  const int d = 4, n = 20000;
  const double rho = 0.5;
  Eigen::MatrixXd sigma(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) sigma(i, j) = std::pow(rho, std::abs(i - j));
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
  const Eigen::VectorXd zeta = Eigen::VectorXd::Constant(d, 0.7);

  AdjustedMoments moments(d);
  Eigen::MatrixXd mean_sq = Eigen::MatrixXd::Zero(d, d);  // for the SE estimate
  for (int s = 0; s < n; ++s) {
    Eigen::VectorXd g(d);
    for (int j = 0; j < d; ++j) g[j] = normal(gen);
    const Eigen::VectorXd x = chol * g;
    Eigen::VectorXd z(d);
    for (int j = 0; j < d; ++j) z[j] = bit(gen) ? x[j] : 0.0;
    moments.accumulate(z, 0.0);
    const Eigen::MatrixXd adj =
        (z * z.transpose()).cwiseQuotient(mask_correction_matrix(zeta));
    mean_sq += adj.cwiseProduct(adj);
  }
  mean_sq /= double(n);
  const Eigen::MatrixXd gamma = moments.adjusted_gram(zeta);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double var = mean_sq(i, j) - gamma(i, j) * gamma(i, j);
      const double se = std::sqrt(std::max(var, 0.0) / double(n));
      CHECK(std::abs(gamma(i, j) - sigma(i, j)) <= 3.0 * se);
    }
}
