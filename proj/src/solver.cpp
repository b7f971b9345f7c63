#include "sambandit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sambandit {

double objective(const LassoProblem& problem, const Eigen::VectorXd& beta) {
  if (beta.size() != problem.gamma_vec.size() ||
      problem.gamma_mat.rows() != beta.size() ||
      problem.gamma_mat.cols() != beta.size())
    throw ConfigError("objective: dimension mismatch");
  const double quad = 0.5 * beta.dot(problem.gamma_mat * beta);
  return quad - problem.gamma_vec.dot(beta) +
         problem.eta * beta.lpNorm<1>();
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double tau) {
  if (tau < 0.0) throw ConfigError("soft_threshold: tau must be >= 0");
  return v.array().sign() * (v.array().abs() - tau).max(0.0);
}

Eigen::VectorXd l1_projection(const Eigen::VectorXd& v, double radius) {
  if (!(radius > 0.0)) throw ConfigError("l1_projection: radius must be positive");
  if (!v.allFinite()) throw NumericError("l1_projection: non-finite input");
  if (v.lpNorm<1>() <= radius) return v;

  // Threshold search on the sorted magnitudes; the largest index satisfying
  // u[k] > (cumsum[k] - R)/(k+1) is taken, which settles ties of duplicate
  // magnitudes deterministically.
  std::vector<double> u(v.data(), v.data() + v.size());
  for (double& x : u) x = std::abs(x);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double cand = (cumsum - radius) / static_cast<double>(k + 1);
    if (u[k] > cand) theta = cand;
  }
  theta = std::max(theta, 0.0);
  return soft_threshold(v, theta);
}

double spectral_bound(const Eigen::MatrixXd& m) {
  const Eigen::Index d = m.rows();
  if (d == 0) return 1e-8;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(d);
  // Deterministic non-uniform start so v is not orthogonal to the dominant
  // eigenvector of a permutation-symmetric matrix.
  for (Eigen::Index i = 0; i < d; ++i) v[i] += 1e-3 * static_cast<double>(i % 7);
  v.normalize();
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd w = m * (m * v);
    const double norm = w.norm();
    if (norm <= 0.0 || !std::isfinite(norm)) break;
    v = w / norm;
  }
  const double sigma = (m * v).norm();
  return std::max(1.1 * sigma, 1e-8);
}

SolverReport solve(const LassoProblem& problem,
                   const std::optional<Eigen::VectorXd>& warm_start,
                   const SolveOptions& opts) {
  const Eigen::Index d = problem.gamma_vec.size();
  if (problem.gamma_mat.rows() != d || problem.gamma_mat.cols() != d)
    throw ConfigError("solve: gamma_mat and gamma_vec dimensions disagree");
  if (problem.eta < 0.0) throw ConfigError("solve: eta must be >= 0");
  if (!(problem.radius > 0.0)) throw ConfigError("solve: radius must be positive");

  SolverReport report;
  report.lipschitz = opts.lipschitz > 0.0 ? opts.lipschitz
                                          : spectral_bound(problem.gamma_mat);
  const double step = 1.0 / report.lipschitz;
  const double tau = problem.eta * step;

  Eigen::VectorXd beta = warm_start ? l1_projection(*warm_start, problem.radius)
                                    : Eigen::VectorXd::Zero(d);
  double f = objective(problem, beta);
  if (!std::isfinite(f))
    throw DivergenceError("solve: objective non-finite at the starting point",
                          report.lipschitz);
  report.objective_trace.push_back(f);

  for (int k = 0; k < opts.max_iter; ++k) {
    const Eigen::VectorXd grad = problem.gamma_mat * beta - problem.gamma_vec;
    Eigen::VectorXd next =
        l1_projection(soft_threshold(beta - step * grad, tau), problem.radius);
    const double f_next = objective(problem, next);
    if (!std::isfinite(f_next))
      throw DivergenceError("solve: objective became non-finite (L too small)",
                            report.lipschitz);
    report.objective_trace.push_back(f_next);
    report.iterations = k + 1;
    const double rel_change = std::abs(f - f_next) / std::max(1.0, std::abs(f));
    beta = std::move(next);
    f = f_next;
    if (rel_change < opts.rel_tol) {
      report.converged = true;
      break;
    }
  }

  report.beta = std::move(beta);
  report.final_objective = f;
  return report;
}

}  // namespace sambandit
