"""Learning-dynamics ODEs: fixed points, growth rates, transitions."""

import numpy as np
import pytest

from rbmcascade import rng as rngmod
from rbmcascade.errors import ContractError
from rbmcascade.synthetic import (MattisSpec, build_correlated_patterns,
                                  random_pattern, solve_pair_magnetizations)
from rbmcascade.theory import (bg_susceptibility, free_energy_surface,
                               integrate_bb_shared_dynamics,
                               integrate_bg_dynamics,
                               integrate_pair_dynamics_full,
                               predict_pair_trajectory, shared_weight_stationarity,
                               solve_hstar)

M14 = 0.8145285312125004
SQB_M14 = np.sqrt(1.4) * M14       # 0.9637631552528195, self-consistency root


def test_hstar_zero_weights():
    assert solve_hstar(np.zeros(50)) == 0.0


def test_hstar_subcritical_norm_is_zero():
    w = random_pattern(100, 1) * np.sqrt(0.5)   # |w|^2/N = 0.5
    assert solve_hstar(w) == 0.0


def test_hstar_aligned_weights_frozen_value():
    xi = random_pattern(64, 2)
    w = xi * np.sqrt(1.4)
    h = solve_hstar(w)
    assert h == pytest.approx(SQB_M14, abs=1e-12)
    assert abs(np.mean(w * np.tanh(h * w)) - h) < 1e-12
    # warm-start perturbations of 1e-3 stay on the same branch
    for eps in (-1e-3, 1e-3):
        assert solve_hstar(w, warm=h * (1 + eps)) == pytest.approx(h, abs=1e-12)


def test_bg_susceptibility_values():
    xi = random_pattern(100, 3)
    assert bg_susceptibility(np.zeros(100), xi) == 0.0
    assert bg_susceptibility(0.5 * xi, xi) == pytest.approx(2500 / 75)
    with pytest.raises(ContractError, match="condensed"):
        bg_susceptibility(1.2 * xi, xi)


def test_bg_susceptibility_critical_exponent():
    # log chi vs log(1 - |w|^2/N) slope -> -1 scaling w toward critical
    xi = random_pattern(200, 4)
    lam = np.sqrt(1.0 - np.logspace(-4, -2, 12))
    chi = [bg_susceptibility(l * xi, xi) for l in lam]
    slope = np.polyfit(np.log(1 - lam ** 2), np.log(chi), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.01)


@pytest.fixture(scope="module")
def bg_traj():
    n = 200
    spec = MattisSpec(1.4, random_pattern(n, 5))
    g = rngmod.make_generator(6, 7)
    w0 = g.uniform(-1e-3, 1e-3, n) / np.sqrt(n)
    w0 += (1e-3 - spec.pattern @ w0 / np.sqrt(n)) * spec.pattern / np.sqrt(n)
    traj = integrate_bg_dynamics(spec, w0, t_max=60.0, dt=0.02, record_every=5,
                                 snapshot_every=50)
    return spec, w0, traj


def test_bg_growth_rate_matches_m_squared(bg_traj):
    spec, _, traj = bg_traj
    n = spec.n_visible
    mask = (np.abs(traj.u_xi) > 10 * abs(traj.u_xi[0])) \
        & (np.abs(traj.u_xi) < 0.05 * np.sqrt(n))
    rate = np.polyfit(traj.t[mask], np.log(np.abs(traj.u_xi[mask])), 1)[0]
    m2 = spec.magnetization() ** 2
    assert rate == pytest.approx(m2, rel=0.01)


def test_bg_saturation_norm_and_alignment(bg_traj):
    spec, _, traj = bg_traj
    assert traj.norm_w[-1] == pytest.approx(np.sqrt(1.4), abs=1e-3)
    ratios = traj.weights_final / spec.pattern
    assert np.ptp(ratios) < 1e-6
    assert traj.extras["h_star"][-1] == pytest.approx(SQB_M14, abs=1e-6)


def test_bg_orthogonal_projection_frozen_while_subcritical(bg_traj):
    spec, w0, traj = bg_traj
    n = spec.n_visible
    g = rngmod.make_generator(8, 9)
    phi = g.normal(0, 1, n)
    phi -= (phi @ spec.pattern) * spec.pattern / n
    phi /= np.linalg.norm(phi)
    drifts = []
    for t, w in traj.snapshots:
        if float(w @ w) / n < 0.5:      # still far from the transition
            drifts.append((t, float(phi @ w)))
    assert len(drifts) >= 3
    values = [d for _, d in drifts]
    dt_span = drifts[-1][0] - drifts[0][0]
    assert abs(values[-1] - values[0]) / max(dt_span, 1.0) < 1e-8


def test_bg_integrator_fourth_order():
    n = 50
    spec = MattisSpec(1.4, random_pattern(n, 10))
    g = rngmod.make_generator(11, 12)
    w0 = g.uniform(-1e-2, 1e-2, n)
    finals = []
    for dt in (0.2, 0.1, 0.05):
        traj = integrate_bg_dynamics(spec, w0, t_max=8.0, dt=dt, record_every=10**6)
        finals.append(traj.u_xi[-1])
    err1 = abs(finals[0] - finals[2])
    err2 = abs(finals[1] - finals[2])
    assert err1 / err2 > 8     # halving dt cuts error ~16x for RK4


def test_bg_requires_ordered_phase():
    spec = MattisSpec(0.9, random_pattern(20, 13))
    with pytest.raises(ContractError):
        integrate_bg_dynamics(spec, np.zeros(20), 1.0)


def test_bb_shared_growth_rate_and_orthogonal_start():
    n = 900
    spec = MattisSpec(1.4, random_pattern(n, 14))
    alpha = 4 / 9
    w0 = 0.05 * spec.pattern / np.sqrt(n)
    traj = integrate_bb_shared_dynamics(spec, alpha, w0, t_max=3.0, dt=0.005,
                                        record_every=10)
    mask = (np.abs(traj.u_xi) > 2 * abs(traj.u_xi[0])) & (np.abs(traj.u_xi) < 3.0)
    rate = np.polyfit(traj.t[mask], np.log(np.abs(traj.u_xi[mask])), 1)[0]
    m2 = spec.magnetization() ** 2
    assert rate == pytest.approx(m2 / alpha, rel=0.01)
    # start orthogonal to the pattern: the projection stays put
    g = rngmod.make_generator(15, 16)
    w_perp = g.normal(0, 1e-3, n)
    w_perp -= (w_perp @ spec.pattern) * spec.pattern / n
    traj2 = integrate_bb_shared_dynamics(spec, alpha, w_perp, t_max=2.0, dt=0.01)
    assert np.max(np.abs(traj2.u_xi)) < 1e-10


def test_bb_shared_stationarity_fixed_point():
    # the flow's endpoint solves the coupled stationarity equations
    n = 400
    spec = MattisSpec(1.4, random_pattern(n, 17))
    alpha = 0.5
    w0 = 0.05 * spec.pattern / np.sqrt(n)
    traj = integrate_bb_shared_dynamics(spec, alpha, w0, t_max=40.0, dt=0.01)
    w_stat, tau_stat = shared_weight_stationarity(alpha, spec.magnetization())
    # per-component magnitude of the aligned weights
    w_mag = np.abs(traj.weights_final).mean()
    assert w_mag == pytest.approx(w_stat, rel=1e-3)
    assert traj.extras["tau"][-1] == pytest.approx(tau_stat, rel=1e-3)


@pytest.fixture(scope="module")
def pair_setup():
    pair = build_correlated_patterns(400, 0.5, seed=18, beta=4.0)
    sol = solve_pair_magnetizations(4.0, 0.5)
    return pair, sol


def test_pair_prediction_rates_exact(pair_setup):
    pair, sol = pair_setup
    pred = predict_pair_trajectory(pair, sol, 0.4, 0.4, 0.3, -0.3, t_max=20.0)
    assert pred.rate_fast == pytest.approx(sol.r ** 2 * 0.75, rel=1e-12)
    assert pred.rate_slow == pytest.approx(sol.p ** 2 * 0.25, rel=1e-12)
    # closed-form projections grow at exactly those rates
    ratio = pred.u_eta1[0][-1] / pred.u_eta1[0][0]
    assert np.log(ratio) == pytest.approx(pred.rate_fast * pred.t[-1], rel=1e-9)


def test_pair_prediction_time_ordering(pair_setup):
    pair, sol = pair_setup
    pred = predict_pair_trajectory(pair, sol, 0.4, 0.4, 0.3, -0.3, t_max=40.0)
    assert pred.t_first < pred.t_second


def test_pair_prediction_doubling_size_shifts_t1(pair_setup):
    pair, sol = pair_setup
    pred1 = predict_pair_trajectory(pair, sol, 0.4, 0.4, 0.3, -0.3, t_max=40.0)
    pair2 = build_correlated_patterns(800, 0.5, seed=18, beta=4.0)
    pred2 = predict_pair_trajectory(pair2, sol, 0.4, 0.4, 0.3, -0.3, t_max=40.0)
    shift = np.log(2) / (2 * pred1.rate_fast)
    assert pred2.t_first - pred1.t_first == pytest.approx(shift, rel=1e-6)


def test_pair_prediction_zero_start_is_never():
    pair, sol = (build_correlated_patterns(100, 0.5, seed=19, beta=4.0),
                 solve_pair_magnetizations(4.0, 0.5))
    pred = predict_pair_trajectory(pair, sol, 0.0, 0.0, 0.0, 0.0, t_max=10.0)
    assert np.isinf(pred.t_first) and np.isinf(pred.t_second)
    # parallel projections: second mode never condenses
    pred2 = predict_pair_trajectory(pair, sol, 0.3, 0.3, 0.0, 0.0, t_max=10.0)
    assert np.isfinite(pred2.t_first) and np.isinf(pred2.t_second)


def test_pair_full_integration_matches_closed_form(pair_setup):
    pair, sol = pair_setup
    n = pair.n_visible
    e1 = pair.eta1 / np.linalg.norm(pair.eta1)
    e2 = pair.eta2 / np.linalg.norm(pair.eta2)
    g = rngmod.make_generator(20, 21)
    w0 = g.normal(0, 1e-6, (2, n))
    for a, (zf, zs) in enumerate(((0.05, 0.03), (0.05, -0.03))):
        w0[a] += (zf - e1 @ w0[a]) * e1 + (zs - e2 @ w0[a]) * e2
    res = integrate_pair_dynamics_full(pair, sol, w0, t_max=6.0, dt=0.02)
    pred = predict_pair_trajectory(pair, sol, 0.05, 0.05, 0.03, -0.03, t_max=6.0)
    # linear regime: compare projections at the final (still subcritical) time
    u1_num = res["u_eta1"][0][-1]
    u1_ref = 0.05 * np.exp(pred.rate_fast * res["t"][-1])
    assert u1_num == pytest.approx(u1_ref, rel=0.01)
    u2_num = res["u_eta2"][0][-1]
    u2_ref = 0.03 * np.exp(pred.rate_slow * res["t"][-1])
    assert u2_num == pytest.approx(u2_ref, rel=0.01)


def test_pair_full_integration_symmetry_preserved(pair_setup):
    pair, sol = pair_setup
    n = pair.n_visible
    e1 = pair.eta1 / np.linalg.norm(pair.eta1)
    e2 = pair.eta2 / np.linalg.norm(pair.eta2)
    w0 = np.stack([0.2 * e1 + 0.1 * e2, 0.2 * e1 - 0.1 * e2])
    res = integrate_pair_dynamics_full(pair, sol, w0, t_max=10.0, dt=0.02)
    assert res["u_eta1"][0][-1] == pytest.approx(res["u_eta1"][1][-1], rel=1e-8)
    assert res["u_eta2"][0][-1] == pytest.approx(-res["u_eta2"][1][-1], rel=1e-8)


@pytest.mark.slow
def test_pair_full_integration_late_time_span(pair_setup):
    pair, sol = pair_setup
    n = pair.n_visible
    e1 = pair.eta1 / np.linalg.norm(pair.eta1)
    e2 = pair.eta2 / np.linalg.norm(pair.eta2)
    g = rngmod.make_generator(22, 23)
    w0 = g.normal(0, 1e-4, (2, n))
    for a, (zf, zs) in enumerate(((0.5, 0.35), (0.5, -0.35))):
        w0[a] += (zf - e1 @ w0[a]) * e1 + (zs - e2 @ w0[a]) * e2
    res = integrate_pair_dynamics_full(pair, sol, w0, t_max=60.0, dt=0.05)
    w = res["weights_final"]
    # span{w1, w2} aligns with span{eta1, eta2}: principal angles < 0.05 rad
    basis = np.linalg.qr(np.stack([e1, e2]).T)[0]
    wq = np.linalg.qr(w.T)[0]
    cos = np.linalg.svd(basis.T @ wq, compute_uv=False)
    assert np.all(np.arccos(np.clip(cos, 0, 1)) < 0.05)


def test_free_energy_surface_minima_progression(pair_setup):
    pair, _ = pair_setup
    n = pair.n_visible
    e1 = pair.eta1 / np.linalg.norm(pair.eta1)
    e2 = pair.eta2 / np.linalg.norm(pair.eta2)
    grid = np.linspace(-1.6, 1.6, 41)
    # zero couplings: single minimum at the origin
    surface, minima = free_energy_surface(np.zeros((2, n)), grid, grid)
    assert len(minima) == 1
    assert abs(minima[0][0]) < 1e-9 and abs(minima[0][1]) < 1e-9
    # condensed along the fast direction only: exactly two minima
    w_two = np.stack([1.3 * np.sqrt(n) * e1, 1.3 * np.sqrt(n) * e1]) / np.sqrt(2)
    surface, minima = free_energy_surface(w_two, grid, grid)
    assert len(minima) == 2
    # both transitions passed: four minima
    w_four = np.stack([1.3 * np.sqrt(n) * e1 + 1.2 * np.sqrt(n) * e2,
                       1.3 * np.sqrt(n) * e1 - 1.2 * np.sqrt(n) * e2]) / np.sqrt(2)
    surface, minima = free_energy_surface(w_four, grid, grid)
    assert len(minima) == 4
