#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sambandit/types.hpp"

namespace sambandit {

/// Quadratic program 0.5 b'Gb - <g,b> + eta*|b|_1 over the l1 ball |b|_1 <= R.
/// G is symmetric but may be indefinite, which is exactly the regime the
/// missingness-adjusted Gram matrix produces.
struct LassoProblem {
  Eigen::MatrixXd gamma_mat;
  Eigen::VectorXd gamma_vec;
  double eta = 0.0;
  double radius = 1.0;
};

struct SolveOptions {
  double rel_tol = 1e-8;
  int max_iter = 500;
  /// When > 0, skip the power-iteration estimate and use this step bound.
  double lipschitz = 0.0;
};

struct SolverReport {
  Eigen::VectorXd beta;
  int iterations = 0;
  double final_objective = 0.0;
  std::vector<double> objective_trace;
  bool converged = false;
  double lipschitz = 0.0;
};

double objective(const LassoProblem& problem, const Eigen::VectorXd& beta);

/// Entrywise sign(v)*max(|v|-tau, 0).
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double tau);

/// Euclidean projection onto {x : |x|_1 <= radius}. Exact sort-based
/// threshold search; returns v unchanged when it is already inside.
Eigen::VectorXd l1_projection(const Eigen::VectorXd& v, double radius);

/// Upper bound on the spectral norm of a symmetric matrix: power iteration
/// on m^2 (50 iterations) times a 1.1 safety factor, floored at 1e-8.
double spectral_bound(const Eigen::MatrixXd& m);

/// Composite projected gradient descent:
///   b <- project(soft_threshold(b - (1/L)(G b - g), eta/L), R)
/// with fixed step 1/L. The combined soft-threshold-then-project step is the
/// exact proximal map of eta*|.|_1 plus the ball indicator, so with
/// L >= |G|_2 each step decreases the objective even for indefinite G.
/// Throws DivergenceError if the objective leaves the finite range.
SolverReport solve(const LassoProblem& problem,
                   const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                   const SolveOptions& opts = {});

}  // namespace sambandit
