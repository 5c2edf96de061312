"""End-to-end experiment recipes: trained runs instrumented for theory checks.

Each run here is a plain maximum-likelihood training (the same gradient
estimator as `trainer`) on teacher data, recording per update the handful of
quantities the closed-form dynamics predict: pattern projections, weight
norms, singular values.  Rates are always reported in rescaled time
t = update * learning_rate, which is the unit the ODEs use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import rng as rngmod
from .errors import ContractError
from .model import HiddenKind, RbmModel, SpinConvention
from .sampling import gibbs_sweep, random_ensemble
from .synthetic import (MattisSpec, PairPatternSpec, sample_hopfield_pair,
                        sample_mattis, solve_pair_magnetizations)
from .theory import PairTrajectory, predict_pair_trajectory
from .trainer import gradient_estimate


def fit_growth_rate(t, u, lo, hi):
    """Slope of log |u| over the window lo <= |u| <= hi (least squares)."""
    t = np.asarray(t, dtype=np.float64)
    u = np.abs(np.asarray(u, dtype=np.float64))
    mask = (u >= lo) & (u <= hi)
    if mask.sum() < 4:
        raise ContractError(
            f"growth window [{lo:g}, {hi:g}] holds only {int(mask.sum())} points")
    return float(np.polyfit(t[mask], np.log(u[mask]), 1)[0])


def crossing_time(t, y, level):
    """First time y reaches ``level``, log-interpolated between records."""
    y = np.asarray(y, dtype=np.float64)
    above = np.nonzero(y >= level)[0]
    if above.size == 0:
        return math.inf
    j = int(above[0])
    if j == 0:
        return float(t[0])
    y0, y1 = y[j - 1], y[j]
    f = (math.log(level) - math.log(y0)) / (math.log(y1) - math.log(y0))
    return float(t[j - 1] + f * (t[j] - t[j - 1]))


def _seeded_init(n_visible, n_hidden, directions, amplitudes, noise, seed):
    """Weight columns with prescribed projections on unit directions plus noise."""
    gen = rngmod.make_generator(seed, rngmod.TAG_INIT)
    w = gen.normal(0.0, noise / math.sqrt(n_visible), (n_visible, n_hidden))
    for a in range(n_hidden):
        for direction, amp in zip(directions, amplitudes[a]):
            w[:, a] += (amp - direction @ w[:, a]) * direction
    return w


# ---------------------------------------------------------------------------
# single-unit Gaussian machine on two-lump data


@dataclass
class BgRunResult:
    t: np.ndarray          # rescaled time, update * epsilon
    u_xi: np.ndarray
    norm_w: np.ndarray     # |w| / sqrt(N_v)
    distance: np.ndarray   # 1 - |w|^2 / N_v
    chi: np.ndarray        # susceptibility formula on the run's weights
    epsilon: float
    model: RbmModel


def run_bg_mattis(beta: float, n_visible: int, *, epsilon: float = 0.02,
                  k: int = 20, n_chains: int = 250, n_samples: int = 10_000,
                  minibatch: int = 500, n_updates: int = 1500, seed: int = 0,
                  u0: float = 0.1) -> BgRunResult:
    """Train the one-Gaussian-hidden machine on factorized two-lump samples.

    Biases stay at zero (the analytical setting); the initial pattern
    projection is pinned to ``u0`` so growth rises out of the chain noise.
    """
    spec = MattisSpec(beta, (rngmod.make_generator(seed, rngmod.TAG_DATA)
                             .random(n_visible) < 0.5) * 2.0 - 1.0)
    data = sample_mattis(spec, n_samples, mode="meanfield", seed=seed + 1)
    xi = spec.pattern
    sqrt_n = math.sqrt(n_visible)
    w0 = _seeded_init(n_visible, 1, [xi / sqrt_n], [[u0]], noise=1e-4, seed=seed)
    model = RbmModel(w0, np.zeros(n_visible), np.zeros(1),
                     SpinConvention.ISING_PM1, HiddenKind.GAUSSIAN, 1.0 / n_visible)
    ens = random_ensemble(model, n_chains, seed, rngmod.TAG_CHAINS)
    order_gen = rngmod.make_generator(seed, rngmod.TAG_BATCH)

    w = model.weights
    rows = np.empty((n_updates, 4))
    for step in range(n_updates):
        rowsel = order_gen.integers(0, n_samples, minibatch)
        dw, _, _ = gradient_estimate(model, data[rowsel], ens, "pcd", k)
        w += epsilon * dw
        wv = w[:, 0]
        load = float(wv @ wv) / n_visible
        u = float(xi @ wv) / sqrt_n
        chi = u * u * n_visible / (n_visible * (1.0 - load)) if load < 1.0 else math.nan
        rows[step] = (u, math.sqrt(load), 1.0 - load, chi)
    t = epsilon * np.arange(1, n_updates + 1)
    return BgRunResult(t, rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3],
                       epsilon, model)


# ---------------------------------------------------------------------------
# two-unit Gaussian machine on four-lump data


@dataclass
class PairRunResult:
    t: np.ndarray
    u_eta1: np.ndarray     # (2, T)
    u_eta2: np.ndarray     # (2, T)
    sigma1: np.ndarray     # singular values of W / 1
    sigma2: np.ndarray
    t_first: float         # measured: sigma1 crosses sqrt(N_v)
    t_second: float
    predicted: PairTrajectory
    epsilon: float


def run_pair_cascade(pair: PairPatternSpec, *, epsilon: float = 0.02, k: int = 20,
                     n_chains: int = 250, n_samples: int = 20_000,
                     minibatch: int = 500, n_updates: int = 1200, seed: int = 0,
                     z_fast: float = 0.5, z_slow: float = 0.35) -> PairRunResult:
    """Train the two-Gaussian-hidden machine on four-lump data and time the
    two condensations against the closed-form prediction."""
    n = pair.n_visible
    sol = solve_pair_magnetizations(pair.beta, pair.kappa)
    data = sample_hopfield_pair(pair, n_samples, mode="meanfield", seed=seed + 1)
    e1 = pair.eta1 / np.linalg.norm(pair.eta1)
    e2 = pair.eta2 / np.linalg.norm(pair.eta2)
    # symmetric-style start: equal fast projections, opposite slow ones
    w0 = _seeded_init(n, 2, [e1, e2], [[z_fast, z_slow], [z_fast, -z_slow]],
                      noise=1e-4, seed=seed)
    model = RbmModel(w0, np.zeros(n), np.zeros(2),
                     SpinConvention.ISING_PM1, HiddenKind.GAUSSIAN, 1.0 / n)
    z = [float(e1 @ w0[:, 0]), float(e1 @ w0[:, 1])]
    zt = [float(e2 @ w0[:, 0]), float(e2 @ w0[:, 1])]

    ens = random_ensemble(model, n_chains, seed, rngmod.TAG_CHAINS)
    order_gen = rngmod.make_generator(seed, rngmod.TAG_BATCH)
    w = model.weights
    rows = np.empty((n_updates, 6))
    for step in range(n_updates):
        rowsel = order_gen.integers(0, n_samples, minibatch)
        dw, _, _ = gradient_estimate(model, data[rowsel], ens, "pcd", k)
        w += epsilon * dw
        gram = w.T @ w
        ev = np.linalg.eigvalsh(gram)
        rows[step] = (e1 @ w[:, 0], e1 @ w[:, 1], e2 @ w[:, 0], e2 @ w[:, 1],
                      math.sqrt(max(ev[1], 0.0)), math.sqrt(max(ev[0], 0.0)))
    t = epsilon * np.arange(1, n_updates + 1)
    sqrt_n = math.sqrt(n)
    t_first = crossing_time(t, rows[:, 4], sqrt_n)
    t_second = crossing_time(t, rows[:, 5], sqrt_n)
    horizon = t[-1] if math.isinf(t_second) else 1.2 * t_second
    predicted = predict_pair_trajectory(pair, sol, z[0], z[1], zt[0], zt[1],
                                        t_max=horizon)
    return PairRunResult(t, rows[:, :2].T, rows[:, 2:4].T, rows[:, 4], rows[:, 5],
                         t_first, t_second, predicted, epsilon)


# ---------------------------------------------------------------------------
# shared-weight binary-binary machine


@dataclass
class SharedRunResult:
    t: np.ndarray
    u_xi: np.ndarray
    epsilon: float
    alpha: float


def run_shared_bb(beta: float, n_visible: int, alpha_num: int, alpha_den: int, *,
                  epsilon: float = 0.03, k: int = 20, n_chains: int = 250,
                  n_samples: int = 10_000, minibatch: int = 500,
                  n_updates: int = 250, seed: int = 0,
                  u0: float = 0.1) -> SharedRunResult:
    """Train the machine whose hidden units all share one weight vector.

    Energy: E = -(v.w) (sum_a h_a) / N_h with +-1 units everywhere.  The
    conditional hidden mean is tanh((v.w)/N_h) for every unit, so the
    sufficient statistic of the hidden layer is its spin sum.
    """
    n_h = n_visible * alpha_num // alpha_den
    if n_h * alpha_den != n_visible * alpha_num:
        raise ContractError("alpha must give an integer hidden-layer size")
    alpha = n_h / n_visible
    spec = MattisSpec(beta, (rngmod.make_generator(seed, rngmod.TAG_DATA)
                             .random(n_visible) < 0.5) * 2.0 - 1.0)
    data = sample_mattis(spec, n_samples, mode="meanfield", seed=seed + 1)
    xi = spec.pattern
    sqrt_n = math.sqrt(n_visible)
    w = (_seeded_init(n_visible, 1, [xi / sqrt_n], [[u0]], noise=1e-4, seed=seed)
         [:, 0])

    gen = rngmod.make_generator(seed, rngmod.TAG_CHAINS)
    v = np.where(gen.random((n_chains, n_visible)) < 0.5, 1.0, -1.0)
    h_sum = np.zeros(n_chains)
    order_gen = rngmod.make_generator(seed, rngmod.TAG_BATCH)

    def sweep(n_sweeps):
        nonlocal v, h_sum
        for _ in range(n_sweeps):
            block = gen.random((n_chains, n_h + n_visible))
            p_h = expit(2.0 * (v @ w) / n_h)
            h = np.where(block[:, :n_h] < p_h[:, None], 1.0, -1.0)
            h_sum = h.sum(axis=1)
            p_v = expit(2.0 * np.outer(h_sum, w) / n_h)
            v = np.where(block[:, n_h:] < p_v, 1.0, -1.0)

    u_track = np.empty(n_updates)
    for step in range(n_updates):
        rowsel = order_gen.integers(0, n_samples, minibatch)
        batch = data[rowsel]
        pos = batch.T @ np.tanh(batch @ w / n_h) / minibatch
        sweep(k)
        neg = v.T @ np.tanh(v @ w / n_h) / n_chains
        w += epsilon * (pos - neg)
        u_track[step] = xi @ w / sqrt_n
    t = epsilon * np.arange(1, n_updates + 1)
    return SharedRunResult(t, u_track, epsilon, alpha)
