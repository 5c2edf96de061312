"""Teacher models generating the synthetic datasets.

Two families of +-1 spin distributions:

* a single-pattern ferromagnet ("two-lump" teacher): p(v) propto
  exp(beta (xi.v)^2 / 2N) with a quenched +-1 pattern xi, ordered for
  beta > 1 with magnetization m solving m = tanh(beta m);
* a correlated two-pattern teacher ("four-lump"): patterns
  xi1 = eta1 + eta2 and xi2 = eta1 - eta2 built from +-1 blocks on disjoint
  supports of relative sizes (1+kappa)/2 and (1-kappa)/2.

Each family has a factorized sampler built on the mean-field solution and a
single-spin Metropolis sampler on the exact Hamiltonian; both are pure
functions of (spec, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from . import rng as rngmod
from .errors import ContractError, PhaseError

_FP_TOL = 1e-13
_FP_MAX_ITER = 100_000
_METROPOLIS_CHUNK = 1 << 20
BURN_IN_SWEEPS = 100      # Metropolis burn-in, in units of N_v proposals
SPACING_SWEEPS = 10       # proposals between recorded samples, in units of N_v


def _damped_fixed_point(update, x0, lam=0.5, tol=_FP_TOL, max_iter=_FP_MAX_ITER):
    """x <- (1-lam) x + lam f(x) until |x - f(x)| < tol."""
    x = float(x0)
    for _ in range(max_iter):
        fx = update(x)
        if abs(fx - x) < tol:
            return fx
        x = (1.0 - lam) * x + lam * fx
    raise ContractError(f"fixed-point iteration did not converge (last x={x!r})")


def _bisect_root(g, lo, hi, tol=1e-15, max_iter=200):
    """Root of g on [lo, hi] with g(lo) > 0 > g(hi)."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def solve_mattis_magnetization(beta: float) -> float:
    """Nonnegative root of m = tanh(beta m); zero for beta <= 1."""
    if beta <= 0:
        raise ContractError("beta must be positive")
    if beta <= 1.0:
        return 0.0
    try:
        m = _damped_fixed_point(lambda m: math.tanh(beta * m), x0=0.9)
    except ContractError:
        m = _bisect_root(lambda m: math.tanh(beta * m) - m, 1e-12, 1.0)
    if abs(m - math.tanh(beta * m)) > 1e-12:
        raise ContractError("magnetization solve failed to reach tolerance")
    return m


@dataclass(frozen=True)
class MattisSpec:
    """Single-pattern teacher: inverse temperature and quenched pattern."""

    beta: float
    pattern: np.ndarray     # +-1 entries, length n_visible

    def __post_init__(self):
        xi = np.asarray(self.pattern, dtype=np.float64)
        if xi.ndim != 1 or not np.all(np.isin(xi, (-1.0, 1.0))):
            raise ContractError("pattern must be a vector of +-1")
        if self.beta <= 0:
            raise ContractError("beta must be positive")
        object.__setattr__(self, "pattern", xi)

    @property
    def n_visible(self) -> int:
        return self.pattern.shape[0]

    def magnetization(self) -> float:
        return solve_mattis_magnetization(self.beta)


def random_pattern(n_visible: int, seed: int, tag: int = rngmod.TAG_DATA) -> np.ndarray:
    gen = rngmod.make_generator(seed, tag)
    return np.where(gen.random(n_visible) < 0.5, -1.0, 1.0)


@dataclass(frozen=True)
class PairPatternSpec:
    """Correlated two-pattern teacher with overlap kappa * n_visible."""

    beta: float
    kappa: float
    eta1: np.ndarray
    eta2: np.ndarray

    def __post_init__(self):
        e1 = np.asarray(self.eta1, dtype=np.float64)
        e2 = np.asarray(self.eta2, dtype=np.float64)
        if e1.shape != e2.shape or e1.ndim != 1:
            raise ContractError("eta vectors must share one length")
        if np.any((e1 != 0) & (e2 != 0)):
            raise ContractError("eta supports must be disjoint")
        if not np.all(np.isin(e1[e1 != 0], (-1.0, 1.0))) or \
           not np.all(np.isin(e2[e2 != 0], (-1.0, 1.0))):
            raise ContractError("eta entries must be 0 or +-1")
        if not 0.0 < self.kappa < 1.0:
            raise ContractError("kappa must lie in (0, 1)")
        if self.beta <= 0:
            raise ContractError("beta must be positive")
        object.__setattr__(self, "eta1", e1)
        object.__setattr__(self, "eta2", e2)

    @property
    def n_visible(self) -> int:
        return self.eta1.shape[0]

    @property
    def xi1(self) -> np.ndarray:
        return self.eta1 + self.eta2

    @property
    def xi2(self) -> np.ndarray:
        return self.eta1 - self.eta2


def build_correlated_patterns(n_visible: int, kappa: float, seed: int,
                              beta: float = 2.0) -> PairPatternSpec:
    """Draw the eta blocks: first ~N(1+kappa)/2 sites for eta1, rest for eta2."""
    if not 0.0 < kappa < 1.0:
        raise ContractError(f"kappa must lie in (0, 1), got {kappa}")
    n1 = int(round(n_visible * (1.0 + kappa) / 2.0))
    n1 = min(max(n1, 1), n_visible - 1)
    gen = rngmod.make_generator(seed, rngmod.TAG_DATA)
    signs = np.where(gen.random(n_visible) < 0.5, -1.0, 1.0)
    eta1 = np.zeros(n_visible)
    eta2 = np.zeros(n_visible)
    eta1[:n1] = signs[:n1]
    eta2[n1:] = signs[n1:]
    return PairPatternSpec(beta, kappa, eta1, eta2)


@dataclass(frozen=True)
class MagnetizationSolution:
    """Four-lump fixed point: m_plus > m_minus > 0 plus the lump overlaps."""

    m_plus: float
    m_minus: float
    r: float    # tanh(beta (m+ + m-))
    p: float    # tanh(beta (m+ - m-))

    def __post_init__(self):
        if not 0.0 <= self.p <= self.r <= 1.0:
            raise ContractError("solution must satisfy 0 <= p <= r <= 1")

    def rate_fast(self, kappa: float) -> float:
        return self.r ** 2 * (1.0 + kappa) / 2.0

    def rate_slow(self, kappa: float) -> float:
        return self.p ** 2 * (1.0 - kappa) / 2.0


def solve_pair_magnetizations(beta: float, kappa: float) -> MagnetizationSolution:
    """Condensed-phase fixed point of the coupled magnetization equations.

    The sum s = m+ + m- and difference d = m+ - m- decouple:
    s = (1+kappa) tanh(beta s) and d = (1-kappa) tanh(beta d), which is used
    to solve, then verified on the coupled form.  Outside T < 1 - kappa the
    solver refuses and labels the phase.
    """
    if not 0.0 < kappa < 1.0:
        raise ContractError("kappa must lie in (0, 1)")
    if beta <= 0:
        raise ContractError("beta must be positive")
    temp = 1.0 / beta
    if temp >= 1.0 - kappa:
        phase = "paramagnetic" if temp > 1.0 + kappa else "pair-retrieval"
        msg = (f"T={temp:g} is outside the four-lump phase (need T < {1 - kappa:g}); "
               f"phase: {phase}")
        if phase == "paramagnetic":
            msg += ", m1=m2=0"
        raise PhaseError(msg, phase)
    s = _damped_fixed_point(lambda x: (1.0 + kappa) * math.tanh(beta * x),
                            x0=1.0 + kappa)
    d = _damped_fixed_point(lambda x: (1.0 - kappa) * math.tanh(beta * x),
                            x0=1.0 - kappa)
    m_plus, m_minus = (s + d) / 2.0, (s - d) / 2.0
    r1 = m_plus - ((1 + kappa) / 2 * math.tanh(beta * (m_plus + m_minus))
                   + (1 - kappa) / 2 * math.tanh(beta * (m_plus - m_minus)))
    r2 = m_minus - ((1 + kappa) / 2 * math.tanh(beta * (m_plus + m_minus))
                    - (1 - kappa) / 2 * math.tanh(beta * (m_plus - m_minus)))
    if max(abs(r1), abs(r2)) > 1e-12:
        raise ContractError("pair magnetization solve failed to reach tolerance")
    return MagnetizationSolution(m_plus, m_minus,
                                 math.tanh(beta * (m_plus + m_minus)),
                                 math.tanh(beta * (m_plus - m_minus)))


# ---------------------------------------------------------------------------
# samplers


def _factorized_draw(gen, means, n_samples):
    u = gen.random((n_samples, means.shape[1]))
    return np.where(u < (1.0 + means) / 2.0, 1.0, -1.0)


def sample_mattis(spec: MattisSpec, n_samples: int, mode: str = "meanfield",
                  seed: int = 0, mcmc_steps: int | None = None,
                  lump_bias: float = 0.5) -> np.ndarray:
    """Draw +-1 samples from the single-pattern teacher.

    meanfield: pick the + lump with probability ``lump_bias`` (0.5 gives the
    symmetric teacher), then spins independently with mean sign * xi_i *
    m(beta); valid only in the ordered phase.  mcmc: sequential single-chain
    Metropolis on the exact (symmetric) Hamiltonian; lump_bias must stay 0.5.
    """
    if not 0.0 < lump_bias < 1.0:
        raise ContractError("lump_bias must lie in (0, 1)")
    if mode == "meanfield":
        m = spec.magnetization()
        if m == 0.0:
            raise PhaseError(
                "factorized sampler needs beta > 1 (ordered phase); use mcmc",
                "paramagnetic")
        gen = rngmod.make_generator(seed, rngmod.TAG_DATA)
        signs = np.where(gen.random(n_samples) < lump_bias, 1.0, -1.0)
        means = signs[:, None] * (m * spec.pattern)[None, :]
        return _factorized_draw(gen, means, n_samples)
    if mode == "mcmc":
        if lump_bias != 0.5:
            raise ContractError("mcmc mode samples the symmetric Hamiltonian; "
                                "lump_bias applies to meanfield only")
        return _metropolis_samples(spec.pattern[None, :], spec.beta, n_samples,
                                   seed, mcmc_steps)
    raise ContractError(f"unknown sampling mode {mode!r}")


def sample_hopfield_pair(spec: PairPatternSpec, n_samples: int,
                         mode: str = "meanfield", seed: int = 0,
                         mcmc_steps: int | None = None,
                         lump_probs=None) -> np.ndarray:
    """Draw +-1 samples from the two-pattern teacher (four lumps).

    ``lump_probs`` reweights the four lumps (+xi1, +xi2, -xi1, -xi2) in the
    factorized sampler; default is the equiprobable teacher.
    """
    if mode == "meanfield":
        sol = solve_pair_magnetizations(spec.beta, spec.kappa)   # may raise PhaseError
        lumps = [(sol.m_plus, sol.m_minus), (sol.m_minus, sol.m_plus),
                 (-sol.m_plus, -sol.m_minus), (-sol.m_minus, -sol.m_plus)]
        if lump_probs is None:
            lump_probs = (0.25, 0.25, 0.25, 0.25)
        probs = np.asarray(lump_probs, dtype=np.float64)
        if probs.shape != (4,) or np.any(probs <= 0) or not math.isclose(probs.sum(), 1.0):
            raise ContractError("lump_probs must be 4 positive numbers summing to 1")
        gen = rngmod.make_generator(seed, rngmod.TAG_DATA)
        edges = np.cumsum(probs)
        which = np.searchsorted(edges, gen.random(n_samples), side="right")
        m1 = np.array([lumps[w][0] for w in which])
        m2 = np.array([lumps[w][1] for w in which])
        fields = spec.beta * (m1[:, None] * spec.xi1[None, :]
                              + m2[:, None] * spec.xi2[None, :])
        return _factorized_draw(gen, np.tanh(fields), n_samples)
    if mode == "mcmc":
        if lump_probs is not None:
            raise ContractError("mcmc mode samples the symmetric Hamiltonian; "
                                "lump_probs applies to meanfield only")
        patterns = np.stack([spec.xi1, spec.xi2])
        return _metropolis_samples(patterns, spec.beta, n_samples, seed, mcmc_steps)
    raise ContractError(f"unknown sampling mode {mode!r}")


def _metropolis_samples(patterns: np.ndarray, beta: float, n_samples: int,
                        seed: int, steps_per_sample: int | None) -> np.ndarray:
    """Sequential-chain Metropolis: burn in, then record every few sweeps."""
    patterns = np.ascontiguousarray(patterns, dtype=np.float64)
    n = patterns.shape[1]
    spacing = steps_per_sample if steps_per_sample is not None else SPACING_SWEEPS * n
    gen = rngmod.make_generator(seed, rngmod.TAG_DATA)
    v = np.where(gen.random(n) < 0.5, 1.0, -1.0)
    overlaps = patterns @ v
    out = np.empty((n_samples, n))

    def run(n_steps):
        done = 0
        while done < n_steps:
            todo = min(_METROPOLIS_CHUNK, n_steps - done)
            sites = gen.integers(0, n, todo)
            u = gen.random(todo)
            kernels.metropolis_pattern_sweep(v, patterns, overlaps, beta, sites, u)
            done += todo

    run(BURN_IN_SWEEPS * n)
    for s in range(n_samples):
        run(spacing)
        out[s] = v
    return out
