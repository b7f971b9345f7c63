// Python bindings for the core operations: the adjusted-moment estimators,
// the projected-gradient lasso solver, the bandit loop, the synthetic
// environment, and the expression-data statistics.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "sambandit/bandit.hpp"
#include "sambandit/environments.hpp"
#include "sambandit/estimators.hpp"
#include "sambandit/geneprobe.hpp"
#include "sambandit/solver.hpp"
#include "sambandit/types.hpp"

namespace py = pybind11;
using namespace sambandit;

namespace {

RewardFn wrap_reward(const py::function& fn) {
  return [fn](int arm) {
    const py::object res = fn(arm);
    RewardFeedback fb;
    if (py::isinstance<py::tuple>(res)) {
      const auto pair = res.cast<std::pair<double, double>>();
      fb.reward = pair.first;
      fb.regret = pair.second;
    } else {
      fb.reward = res.cast<double>();
    }
    return fb;
  };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse contextual bandits under covariates missing at random";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError",
                                          PyExc_ArithmeticError);

  py::class_<Rng>(m, "Rng", "Deterministic per-stream random generator")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("normal", &Rng::normal)
      .def("uniform", &Rng::uniform)
      .def("below", &Rng::below, py::arg("n"));
  m.def("seed_stream", &seed_stream, py::arg("seed"), py::arg("trial"),
        py::arg("stream"), "Derive an independent stream seed");

  // --- solver ---------------------------------------------------------------

  py::class_<LassoProblem>(m, "LassoProblem")
      .def(py::init<>())
      .def_readwrite("gamma_mat", &LassoProblem::gamma_mat)
      .def_readwrite("gamma_vec", &LassoProblem::gamma_vec)
      .def_readwrite("eta", &LassoProblem::eta)
      .def_readwrite("radius", &LassoProblem::radius);

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("rel_tol", &SolveOptions::rel_tol)
      .def_readwrite("max_iter", &SolveOptions::max_iter)
      .def_readwrite("lipschitz", &SolveOptions::lipschitz);

  py::class_<SolverReport>(m, "SolverReport")
      .def_readonly("beta", &SolverReport::beta)
      .def_readonly("iterations", &SolverReport::iterations)
      .def_readonly("final_objective", &SolverReport::final_objective)
      .def_readonly("objective_trace", &SolverReport::objective_trace)
      .def_readonly("converged", &SolverReport::converged)
      .def_readonly("lipschitz", &SolverReport::lipschitz);

  m.def("solve", &solve, py::arg("problem"),
        py::arg("warm_start") = std::nullopt,
        py::arg("options") = SolveOptions{},
        "Composite projected-gradient descent on the penalized quadratic");
  m.def("objective", &objective, py::arg("problem"), py::arg("beta"));
  m.def("soft_threshold", &soft_threshold, py::arg("v"), py::arg("tau"));
  m.def("l1_projection", &l1_projection, py::arg("v"), py::arg("radius"),
        "Euclidean projection onto the l1 ball");
  m.def("spectral_bound", &spectral_bound, py::arg("m"),
        "Power-iteration upper bound on the spectral norm");

  // --- estimators -----------------------------------------------------------

  py::class_<SamplingProbEstimate>(m, "SamplingProbEstimate")
      .def(py::init<Eigen::Index, double>(), py::arg("d"),
           py::arg("floor") = 1e-3)
      .def("update", &SamplingProbEstimate::update, py::arg("mask_round"))
      .def("zeta_hat", &SamplingProbEstimate::zeta_hat)
      .def("zeta_min", &SamplingProbEstimate::zeta_min)
      .def_property_readonly("raw_mean", &SamplingProbEstimate::raw_mean)
      .def_property_readonly("rounds", &SamplingProbEstimate::rounds);

  m.def("mask_correction_matrix", &mask_correction_matrix, py::arg("zeta"));

  py::class_<AdjustedMoments>(m, "AdjustedMoments")
      .def(py::init<Eigen::Index>(), py::arg("d"))
      .def("accumulate", &AdjustedMoments::accumulate, py::arg("z"),
           py::arg("reward"))
      .def("adjusted_gram",
           py::overload_cast<const SamplingProbEstimate&>(
               &AdjustedMoments::adjusted_gram, py::const_),
           py::arg("probs"))
      .def("adjusted_gram",
           py::overload_cast<const Eigen::VectorXd&>(
               &AdjustedMoments::adjusted_gram, py::const_),
           py::arg("zeta"))
      .def("adjusted_cross",
           py::overload_cast<const SamplingProbEstimate&>(
               &AdjustedMoments::adjusted_cross, py::const_),
           py::arg("probs"))
      .def("adjusted_cross",
           py::overload_cast<const Eigen::VectorXd&>(
               &AdjustedMoments::adjusted_cross, py::const_),
           py::arg("zeta"))
      .def_property_readonly("gram_sum", &AdjustedMoments::gram_sum)
      .def_property_readonly("cross_sum", &AdjustedMoments::cross_sum)
      .def_property_readonly("rounds", &AdjustedMoments::rounds);

  // --- bandit ---------------------------------------------------------------

  py::enum_<ResolveCadence>(m, "ResolveCadence")
      .value("every_round", ResolveCadence::EveryRound)
      .value("doubling", ResolveCadence::Doubling);

  py::class_<BanditConfig>(m, "BanditConfig")
      .def(py::init<>())
      .def_readwrite("d", &BanditConfig::d)
      .def_readwrite("eta1", &BanditConfig::eta1)
      .def_readwrite("radius", &BanditConfig::radius)
      .def_readwrite("zeta_floor", &BanditConfig::zeta_floor)
      .def_readwrite("adjust_moments", &BanditConfig::adjust_moments)
      .def_readwrite("cadence", &BanditConfig::cadence)
      .def_readwrite("solver", &BanditConfig::solver);

  py::class_<RoundOutcome>(m, "RoundOutcome")
      .def_readonly("chosen_arm", &RoundOutcome::chosen_arm)
      .def_readonly("reward", &RoundOutcome::reward)
      .def_readonly("regret", &RoundOutcome::regret)
      .def_readonly("eta_t", &RoundOutcome::eta_t)
      .def_readonly("beta_l1", &RoundOutcome::beta_l1)
      .def_readonly("zeta_min_hat", &RoundOutcome::zeta_min_hat)
      .def_readonly("solver_iterations", &RoundOutcome::solver_iterations);

  m.def("select_arm", &select_arm, py::arg("observed"), py::arg("zeta_hat"),
        py::arg("beta_hat"),
        "Plug-in arm choice: argmax of (z / zeta) . beta");
  m.def("regularization_schedule", &regularization_schedule, py::arg("eta1"),
        py::arg("t"), py::arg("zeta_min"), py::arg("d"));

  py::class_<SamBandit>(m, "SamBandit")
      .def(py::init<const BanditConfig&>(), py::arg("config"))
      .def("step",
           [](SamBandit& self, const ContextRound& round,
              const py::function& reward_fn) {
             return self.step(round, wrap_reward(reward_fn));
           },
           py::arg("round"), py::arg("reward_fn"),
           "Advance one round; reward_fn(arm) returns reward or "
           "(reward, regret)")
      .def_property_readonly("beta_hat", &SamBandit::beta_hat)
      .def_property_readonly("rounds", &SamBandit::rounds);

  py::class_<OlsBandit>(m, "OlsBandit")
      .def(py::init<int, double, double>(), py::arg("d"), py::arg("ridge"),
           py::arg("zeta_floor"))
      .def("step",
           [](OlsBandit& self, const ContextRound& round,
              const py::function& reward_fn) {
             return self.step(round, wrap_reward(reward_fn));
           },
           py::arg("round"), py::arg("reward_fn"))
      .def_property_readonly("beta_hat", &OlsBandit::beta_hat);

  py::class_<OraclePolicy>(m, "OraclePolicy")
      .def(py::init<Eigen::VectorXd>(), py::arg("beta_star"))
      .def("step",
           [](const OraclePolicy& self, const ContextRound& round,
              const py::function& reward_fn) {
             return self.step(round, wrap_reward(reward_fn));
           },
           py::arg("round"), py::arg("reward_fn"));

  // --- synthetic environment ------------------------------------------------

  py::class_<ContextRound>(m, "ContextRound")
      .def(py::init<>())
      .def_readwrite("x", &ContextRound::x)
      .def_readwrite("u", &ContextRound::u)
      .def_readwrite("z", &ContextRound::z);

  py::class_<SyntheticEnvConfig>(m, "SyntheticEnvConfig")
      .def(py::init<>())
      .def_readwrite("K", &SyntheticEnvConfig::K)
      .def_readwrite("d", &SyntheticEnvConfig::d)
      .def_readwrite("s0", &SyntheticEnvConfig::s0)
      .def_readwrite("b", &SyntheticEnvConfig::b)
      .def_readwrite("rho", &SyntheticEnvConfig::rho)
      .def_readwrite("noise_sd", &SyntheticEnvConfig::noise_sd)
      .def_readwrite("zeta", &SyntheticEnvConfig::zeta)
      .def_readwrite("T", &SyntheticEnvConfig::T)
      .def_readwrite("seed", &SyntheticEnvConfig::seed)
      .def("validate", &SyntheticEnvConfig::validate);

  py::class_<SyntheticEnv>(m, "SyntheticEnv")
      .def(py::init<const SyntheticEnvConfig&, std::uint64_t>(),
           py::arg("config"), py::arg("stream_seed"))
      .def_property_readonly("beta_star", &SyntheticEnv::beta_star)
      .def("next_round", &SyntheticEnv::next_round)
      .def("next_noise", &SyntheticEnv::next_noise)
      .def("reward_of", &SyntheticEnv::reward_of, py::arg("round"),
           py::arg("chosen"), py::arg("noise"))
      .def_property_readonly("trajectory_hash", &SyntheticEnv::trajectory_hash);

  m.def("make_beta",
        [](int d, int s0, double b, std::uint64_t seed) {
          Rng rng(seed);
          return make_beta(d, s0, b, rng);
        },
        py::arg("d"), py::arg("s0"), py::arg("b"), py::arg("seed"),
        "Sparse parameter with s0 nonzeros, magnitudes in [b/2, b]");
  m.def("toeplitz_sigma", &toeplitz_sigma, py::arg("d"), py::arg("rho"));
  m.def("sample_round", &sample_round, py::arg("chol_lower"), py::arg("zeta"),
        py::arg("K"), py::arg("rng"));
  m.def("regret_of", &regret_of, py::arg("round"), py::arg("beta_star"),
        py::arg("chosen"));

  // --- expression-data statistics -------------------------------------------

  py::class_<WelchResult>(m, "WelchResult")
      .def_readonly("t_stat", &WelchResult::t_stat)
      .def_readonly("dof", &WelchResult::dof)
      .def_readonly("p_value", &WelchResult::p_value);

  m.def("welch_t", &welch_t, py::arg("x1"), py::arg("x2"),
        "Welch's two-sample t-test");
  m.def("student_t_tail", &student_t_tail, py::arg("t"), py::arg("dof"),
        "Two-sided tail probability of Student's t");
  m.def("regularized_incomplete_beta", &regularized_incomplete_beta,
        py::arg("a"), py::arg("b"), py::arg("x"));
  m.def("logit_reward", &logit_reward, py::arg("p_value"));

  py::class_<ExpressionDataset>(m, "ExpressionDataset")
      .def(py::init<>())
      .def_readwrite("values", &ExpressionDataset::values)
      .def_readwrite("m1", &ExpressionDataset::m1)
      .def_readwrite("m2", &ExpressionDataset::m2)
      .def_readwrite("probe_ids", &ExpressionDataset::probe_ids)
      .def_property_readonly("probes", &ExpressionDataset::probes)
      .def_property_readonly("samples", &ExpressionDataset::samples);

  m.def("load_expression", &load_expression, py::arg("path"),
        py::arg("log1p_transform") = false);
  m.def("write_expression", &write_expression, py::arg("dataset"),
        py::arg("path"));
  m.def("full_data_p_values", &full_data_p_values, py::arg("dataset"));
  m.def("probe_reward", &probe_reward, py::arg("dataset"),
        py::arg("probe_index"), py::arg("rng"), py::arg("noise_sd") = 0.0);

  py::class_<ProbeSelectionConfig>(m, "ProbeSelectionConfig")
      .def(py::init<>())
      .def_readwrite("arms_per_round", &ProbeSelectionConfig::arms_per_round)
      .def_readwrite("pulls", &ProbeSelectionConfig::pulls)
      .def_readwrite("alpha", &ProbeSelectionConfig::alpha)
      .def_readwrite("reward_noise_sd", &ProbeSelectionConfig::reward_noise_sd)
      .def_readwrite("bandit", &ProbeSelectionConfig::bandit)
      .def_readwrite("ols_ridge", &ProbeSelectionConfig::ols_ridge);

  py::class_<SuccessSeries>(m, "SuccessSeries")
      .def_readonly("success_rate", &SuccessSeries::success_rate)
      .def_readonly("trials", &SuccessSeries::trials)
      .def_readonly("any_significant", &SuccessSeries::any_significant);

  m.def("run_probe_selection", &run_probe_selection, py::arg("dataset"),
        py::arg("config"), py::arg("policy"), py::arg("trials"),
        py::arg("seed"),
        "Success-rate series for sequential probe selection");
}
