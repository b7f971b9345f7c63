"""Smoke tests for the compiled extension: every major operation is reachable
from Python, numpy arrays flow in and out, and a short bandit loop runs."""

import math

import numpy as np
import pytest

import sambandit as sb


def test_version_string():
    assert sb.__version__ == "0.1.0"


def test_solver_identity_gram_pinned_point():
    problem = sb.LassoProblem()
    problem.gamma_mat = np.eye(2)
    problem.gamma_vec = np.array([1.0, 0.2])
    problem.eta = 0.5
    problem.radius = 10.0
    # rel_tol 0 never trips the early stop, so the iteration runs to the
    # numeric fixed point of the contraction map instead of parking a few
    # 1e-6 away from the analytic solution.
    options = sb.SolveOptions()
    options.rel_tol = 0.0
    options.max_iter = 20000
    report = sb.solve(problem, options=options)
    np.testing.assert_allclose(report.beta, [0.5, 0.0], atol=1e-6)
    # The trace never increases.
    trace = np.asarray(report.objective_trace)
    assert np.all(np.diff(trace) <= 1e-10)


def test_projection_and_threshold():
    np.testing.assert_allclose(
        sb.l1_projection(np.array([3.0, 0.0]), 1.0), [1.0, 0.0], atol=1e-12
    )
    np.testing.assert_allclose(
        sb.soft_threshold(np.array([0.7, -0.2]), 0.5), [0.2, 0.0], atol=1e-15
    )
    with pytest.raises(ValueError):
        sb.l1_projection(np.array([1.0]), 0.0)


def test_spectral_bound_dominates_eigenvalues():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 6))
    sym = (a + a.T) / 2
    top = np.max(np.abs(np.linalg.eigvalsh(sym)))
    assert sb.spectral_bound(sym) >= top


def test_selection_and_schedule():
    z = np.array([[0.5], [0.2]])
    assert sb.select_arm(z, np.array([0.5]), np.array([1.0])) == 0
    assert sb.select_arm(np.zeros((4, 3)), np.ones(3), np.zeros(3)) == 0
    assert sb.regularization_schedule(1.0, 100, 1.0, 200) == pytest.approx(
        0.4870215412, abs=1e-9
    )


def test_adjusted_moments_full_observation_is_raw():
    moments = sb.AdjustedMoments(3)
    rng = np.random.default_rng(0)
    for _ in range(5):
        moments.accumulate(rng.normal(size=3), rng.normal())
    ones = np.ones(3)
    np.testing.assert_array_equal(
        moments.adjusted_gram(ones), moments.gram_sum / 5
    )
    np.testing.assert_array_equal(
        moments.adjusted_cross(ones), moments.cross_sum / 5
    )


def test_welch_and_tails():
    res = sb.welch_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert res.t_stat == 0.0 and res.p_value == 1.0
    assert sb.student_t_tail(1.0, 1.0) == pytest.approx(0.5, abs=1e-10)
    assert sb.logit_reward(0.05) == pytest.approx(math.log(19.0), abs=1e-12)
    with pytest.raises(ValueError):
        sb.welch_t([1.0], [1.0, 2.0])


def test_bandit_loop_end_to_end():
    cfg = sb.SyntheticEnvConfig()
    cfg.K, cfg.d, cfg.s0, cfg.T = 3, 8, 2, 30
    cfg.zeta = np.full(8, 0.8)
    env = sb.SyntheticEnv(cfg, sb.seed_stream(1, 0, 17))

    bcfg = sb.BanditConfig()
    bcfg.d = 8
    bcfg.radius = 3.0
    bandit = sb.SamBandit(bcfg)

    total_regret = 0.0
    for _ in range(cfg.T):
        round_ = env.next_round()
        noise = env.next_noise()
        outcome = bandit.step(
            round_,
            lambda arm: (
                env.reward_of(round_, arm, noise),
                sb.regret_of(round_, env.beta_star, arm),
            ),
        )
        assert 0 <= outcome.chosen_arm < cfg.K
        assert outcome.regret >= 0.0
        total_regret += outcome.regret

    assert bandit.rounds == cfg.T
    assert bandit.beta_hat.shape == (8,)
    assert np.abs(bandit.beta_hat).sum() <= bcfg.radius + 1e-9
    assert math.isfinite(total_regret)


def test_probe_selection_roundtrip(tmp_path):
    path = tmp_path / "genes.tsv"
    path.write_text(
        "id\tA\tA\tA\tB\tB\tB\n"
        "hot\t5.0\t5.1\t4.9\t1.0\t1.1\t0.9\n"
        "dull\t2.0\t2.1\t1.9\t2.0\t2.1\t1.9\n"
    )
    ds = sb.load_expression(str(path))
    assert ds.probes == 2 and ds.samples == 6
    p = sb.full_data_p_values(ds)
    assert p[0] < 0.05 < p[1]

    cfg = sb.ProbeSelectionConfig()
    cfg.arms_per_round = 0
    cfg.pulls = 5
    cfg.bandit.d = ds.samples
    cfg.bandit.radius = 4.0
    series = sb.run_probe_selection(ds, cfg, "sam", 2, 1)
    assert len(series.success_rate) == 5
    assert series.any_significant
