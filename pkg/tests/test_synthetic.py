"""Teacher models: mean-field solvers and samplers against frozen oracles.

Frozen fixed-point values were computed with an independent bisection on
the defining equations (scipy brentq at xtol 1e-15).
"""

import numpy as np
import pytest

from rbmcascade.errors import ContractError, PhaseError
from rbmcascade.synthetic import (MattisSpec, build_correlated_patterns, random_pattern,
                                  sample_hopfield_pair, sample_mattis,
                                  solve_mattis_magnetization,
                                  solve_pair_magnetizations)

M_BETA_14 = 0.8145285312125004      # root of m = tanh(1.4 m), bisection
M_BETA_15 = 0.8585596366401104


def test_magnetization_below_critical_is_zero():
    assert solve_mattis_magnetization(0.5) == 0.0
    assert solve_mattis_magnetization(1.0) == 0.0


def test_magnetization_saturates_at_large_beta():
    assert solve_mattis_magnetization(60.0) == pytest.approx(1.0, abs=1e-9)


def test_magnetization_frozen_value_and_residual():
    m = solve_mattis_magnetization(1.4)
    assert m == pytest.approx(M_BETA_14, abs=1e-12)
    assert abs(m - np.tanh(1.4 * m)) < 1e-12


def test_magnetization_stable_under_restarts():
    # the solver is deterministic; perturbing beta infinitesimally must not
    # hop branches
    vals = [solve_mattis_magnetization(1.4 + 1e-12 * i) for i in range(10)]
    assert np.ptp(vals) < 1e-10


def test_fixed_point_iteration_start_independent():
    # damped iteration from 10 random positive starts lands on one root
    # (zero is repelling above the transition)
    import math

    from rbmcascade.synthetic import _damped_fixed_point
    gen = np.random.default_rng(3)
    roots = {round(_damped_fixed_point(lambda x: 1.5 * math.tanh(4.0 * x), x0), 10)
             for x0 in gen.uniform(0.05, 3.0, 10)}
    assert len(roots) == 1


def test_mattis_meanfield_second_moment():
    n, n_samples = 1000, 10_000
    spec = MattisSpec(1.4, random_pattern(n, 3))
    data = sample_mattis(spec, n_samples, seed=5)
    m2 = np.mean((data @ spec.pattern / n) ** 2)
    expect = M_BETA_14 ** 2 + (1 - M_BETA_14 ** 2) / n
    stderr = np.std((data @ spec.pattern / n) ** 2) / np.sqrt(n_samples)
    assert abs(m2 - expect) < 3 * stderr


def test_mattis_meanfield_connected_correlation():
    # <v_i v_j> -> xi_i xi_j m^2 off-diagonal, 4 sigma
    n, n_samples = 40, 40_000
    spec = MattisSpec(1.4, random_pattern(n, 4))
    data = sample_mattis(spec, n_samples, seed=6)
    corr = data.T @ data / n_samples
    expect = np.outer(spec.pattern, spec.pattern) * M_BETA_14 ** 2
    off = ~np.eye(n, dtype=bool)
    sigma = 4.0 / np.sqrt(n_samples)
    assert np.max(np.abs(corr[off] - expect[off])) < 4 * sigma


def test_all_ones_pattern_gives_bimodal_magnetization():
    n = 400
    spec = MattisSpec(1.5, np.ones(n))
    data = sample_mattis(spec, 4000, seed=7)
    m = data.mean(axis=1)
    assert (m > 0.5).any() and (m < -0.5).any()
    assert np.abs(m).mean() > 0.7 * M_BETA_15


def test_meanfield_needs_ordered_phase():
    spec = MattisSpec(0.8, random_pattern(20, 8))
    with pytest.raises(PhaseError) as err:
        sample_mattis(spec, 10, seed=1)
    assert err.value.phase == "paramagnetic"


def test_mattis_mcmc_matches_meanfield_moments():
    n, n_samples = 200, 2500
    spec = MattisSpec(1.4, random_pattern(n, 9))
    mf = sample_mattis(spec, n_samples, seed=10)
    mc = sample_mattis(spec, n_samples, mode="mcmc", seed=11)
    q_mf = (mf @ spec.pattern / n) ** 2
    q_mc = (mc @ spec.pattern / n) ** 2
    sigma = np.sqrt(q_mf.var() / n_samples + q_mc.var() / n_samples)
    assert abs(q_mf.mean() - q_mc.mean()) < 4 * sigma


def test_lump_bias_shifts_sign_frequencies():
    n = 300
    spec = MattisSpec(1.5, random_pattern(n, 12))
    data = sample_mattis(spec, 4000, seed=13, lump_bias=0.8)
    proj = data @ spec.pattern / n
    assert (proj > 0).mean() == pytest.approx(0.8, abs=0.03)
    with pytest.raises(ContractError):
        sample_mattis(spec, 10, mode="mcmc", seed=1, lump_bias=0.8)


# ---------------------------------------------------------------------------
# correlated pair


def test_build_correlated_patterns_exact_arithmetic():
    spec = build_correlated_patterns(100, 0.5, seed=2)
    assert int(np.sum(spec.eta1 != 0)) == 75
    assert int(np.sum(spec.eta2 != 0)) == 25
    assert float(spec.xi1 @ spec.xi2) == 50.0
    assert float(spec.xi1 @ spec.xi1) == 100.0
    assert float(spec.xi2 @ spec.xi2) == 100.0


def test_build_correlated_patterns_near_orthogonal_limit():
    spec = build_correlated_patterns(100, 0.02, seed=3)
    assert int(np.sum(spec.eta1 != 0)) == 51
    assert int(np.sum(spec.eta2 != 0)) == 49
    assert abs(float(spec.xi1 @ spec.xi2)) <= 2.0


def test_pattern_sum_identity():
    spec = build_correlated_patterns(64, 0.4, seed=4)
    assert np.array_equal(spec.xi1 + spec.xi2, 2 * spec.eta1)


def test_kappa_out_of_range_rejected():
    with pytest.raises(ContractError, match="kappa"):
        build_correlated_patterns(100, 1.5, seed=1)
    with pytest.raises(ContractError, match="kappa"):
        build_correlated_patterns(100, 0.0, seed=1)


def test_pair_solver_phase_refusals():
    with pytest.raises(PhaseError) as err:
        solve_pair_magnetizations(0.5, 0.5)      # T=2 > 1+kappa
    assert err.value.phase == "paramagnetic"
    assert "m1=m2=0" in str(err.value)
    with pytest.raises(PhaseError) as err:
        solve_pair_magnetizations(1.0, 0.5)      # 1-kappa < T < 1+kappa
    assert err.value.phase == "pair-retrieval"


def test_pair_solver_saturation_limit():
    sol = solve_pair_magnetizations(50.0, 0.5)
    assert sol.m_plus == pytest.approx(1.0, abs=1e-9)
    assert sol.m_minus == pytest.approx(0.5, abs=1e-9)


def test_pair_solver_r_exceeds_p():
    for beta, kappa in ((4.0, 0.5), (3.0, 0.3), (10.0, 0.7)):
        sol = solve_pair_magnetizations(beta, kappa)
        assert sol.r > sol.p > 0


def test_pair_meanfield_correlations():
    # <v_i v_j> = r^2 eta1 eta1 + p^2 eta2 eta2 off-diagonal, 4 sigma
    n, n_samples = 60, 40_000
    spec = build_correlated_patterns(n, 0.5, seed=5, beta=4.0)
    sol = solve_pair_magnetizations(4.0, 0.5)
    data = sample_hopfield_pair(spec, n_samples, seed=6)
    corr = data.T @ data / n_samples
    expect = sol.r ** 2 * np.outer(spec.eta1, spec.eta1) \
        + sol.p ** 2 * np.outer(spec.eta2, spec.eta2)
    off = ~np.eye(n, dtype=bool)
    assert np.max(np.abs(corr[off] - expect[off])) < 4 * 4.0 / np.sqrt(n_samples)


def test_pair_projections_form_four_lumps():
    n = 400
    spec = build_correlated_patterns(n, 0.5, seed=7, beta=4.0)
    sol = solve_pair_magnetizations(4.0, 0.5)
    data = sample_hopfield_pair(spec, 2000, seed=8)
    p1 = data @ spec.xi1 / n
    p2 = data @ spec.xi2 / n
    centers = [(sol.m_plus, sol.m_minus), (sol.m_minus, sol.m_plus),
               (-sol.m_plus, -sol.m_minus), (-sol.m_minus, -sol.m_plus)]
    dist = np.min([np.hypot(p1 - c1, p2 - c2) for c1, c2 in centers], axis=0)
    assert np.percentile(dist, 95) < 0.15
    counts = [np.sum(np.argmin([np.hypot(p1 - c1, p2 - c2)
                                for c1, c2 in centers], axis=0) == i)
              for i in range(4)]
    assert min(counts) > 2000 / 8


def test_pair_degenerate_kappa_lumps_merge():
    # four-lump phase needs T < 1 - kappa = 0.02 here
    spec = build_correlated_patterns(200, 0.98, seed=9, beta=100.0)
    data = sample_hopfield_pair(spec, 500, seed=10)
    p1 = data @ spec.xi1 / 200
    p2 = data @ spec.xi2 / 200
    # xi1 ~ xi2 at kappa -> 1: the +xi1/+xi2 lumps coincide (and likewise -),
    # so the spread transverse to the diagonal collapses
    assert np.std(p1 - p2) < 0.05
    assert np.std(p1 + p2) > 1.0


def test_pair_mcmc_matches_meanfield_moments():
    # a sequential chain cannot tunnel between lumps at this size, so only
    # lump-exchange-invariant statistics are comparable across samplers;
    # (xi1.v)^2 + (xi2.v)^2 takes the same value on all four lumps
    n, n_samples = 200, 1500
    spec = build_correlated_patterns(n, 0.5, seed=11, beta=3.0)
    mf = sample_hopfield_pair(spec, n_samples, seed=12)
    mc = sample_hopfield_pair(spec, n_samples, mode="mcmc", seed=13)
    q_mf = (mf @ spec.xi1 / n) ** 2 + (mf @ spec.xi2 / n) ** 2
    q_mc = (mc @ spec.xi1 / n) ** 2 + (mc @ spec.xi2 / n) ** 2
    sigma = np.sqrt(q_mf.var() / n_samples + q_mc.var() / n_samples)
    # the factorized sampler carries O(1/N) corrections relative to the exact
    # within-lump measure, so allow that systematic on top of sampling noise
    assert abs(q_mf.mean() - q_mc.mean()) < 4 * sigma + 2.0 / n
    sol = solve_pair_magnetizations(3.0, 0.5)
    lump_value = sol.m_plus ** 2 + sol.m_minus ** 2
    for q in (q_mf.mean(), q_mc.mean()):
        assert q == pytest.approx(lump_value, abs=4.0 / n)


def test_pca_directions_are_the_etas():
    from rbmcascade.observables import dataset_pca
    n = 500
    spec = build_correlated_patterns(n, 0.5, seed=14, beta=4.0)
    data = sample_hopfield_pair(spec, 10_000, seed=15)
    pca = dataset_pca(data)
    e1 = spec.eta1 / np.linalg.norm(spec.eta1)
    e2 = spec.eta2 / np.linalg.norm(spec.eta2)
    assert abs(pca.directions[:, 0] @ e1) > 0.99
    assert abs(pca.directions[:, 1] @ e2) > 0.99
