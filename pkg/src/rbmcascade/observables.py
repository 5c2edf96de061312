"""Everything measured on a training run: modes, susceptibilities, scaling.

The weight matrix is tracked through its singular value decomposition
W = sum_a w_a u_a ubar_a^T; configurations are projected on the singular
vectors to get per-mode magnetizations m_a = v.u_a / sqrt(N_v) (hidden
analog with ubar), whose size-scaled variance is the susceptibility
chi = N var(m).  An annealed scan walks a ladder of checkpoints, carrying
an equilibrated chain ensemble from model to model, and records modes,
magnetization moments, susceptibilities and pattern overlaps; cooling runs
the ladder in training order from random chains, heating runs it backwards
from fully aligned chains.  Finite-size scaling uses the effective size
N = sqrt(N_v N_h) with exponents gamma=1, nu=1/2 at upper critical
dimension 4, so both collapse exponents are 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .errors import ContractError
from .model import RbmModel, SpinConvention
from .modelio import load_model
from .sampling import aligned_ensemble, gibbs_sweep, random_ensemble
from .trainer import load_manifest

DEFAULT_SCAN_SWEEPS = 1000   # Gibbs sweeps per checkpoint during a scan
DEFAULT_N_MODES = 10


# ---------------------------------------------------------------------------
# decompositions


@dataclass(frozen=True)
class SvdTriplet:
    values: np.ndarray        # descending singular values
    left: np.ndarray          # (n_visible, k) columns u_a
    right: np.ndarray         # (n_hidden, k) columns ubar_a


def _fix_signs(vectors: np.ndarray, partners: np.ndarray):
    """Flip column pairs so each vector's largest-|component| is positive."""
    for a in range(vectors.shape[1]):
        idx = int(np.argmax(np.abs(vectors[:, a])))
        if vectors[idx, a] < 0:
            vectors[:, a] = -vectors[:, a]
            partners[:, a] = -partners[:, a]


def svd_of_weights(model: RbmModel) -> SvdTriplet:
    u, s, vh = np.linalg.svd(model.weights, full_matrices=False)
    u = np.ascontiguousarray(u)
    v = np.ascontiguousarray(vh.T)
    _fix_signs(u, v)
    return SvdTriplet(s, u, v)


@dataclass(frozen=True)
class PcaResult:
    eigenvalues: np.ndarray   # descending
    directions: np.ndarray    # (n_visible, k) columns
    degenerate: bool          # constant dataset


def dataset_pca(dataset: np.ndarray) -> PcaResult:
    """Eigendecomposition of the mean-centered sample covariance."""
    data = np.asarray(dataset, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ContractError("PCA needs at least two samples")
    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / (data.shape[0] - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = np.ascontiguousarray(evecs[:, order])
    dummy = np.zeros((1, evecs.shape[1]))
    _fix_signs(evecs, dummy)
    return PcaResult(evals, evecs, degenerate=bool(np.all(evals < 1e-12)))


def mode_magnetizations(visible: np.ndarray, hidden: np.ndarray,
                        svd: SvdTriplet, n_modes: int):
    """Per-chain projections on the first n_modes singular directions."""
    n_modes = min(n_modes, svd.values.shape[0])
    n_v = visible.shape[1]
    n_h = hidden.shape[1]
    m = visible @ svd.left[:, :n_modes] / math.sqrt(n_v)
    mbar = hidden @ svd.right[:, :n_modes] / math.sqrt(n_h)
    return m, mbar


def susceptibility(samples: np.ndarray, n: float, beta: float | None = None) -> float:
    """Size-scaled variance n * var(samples); optionally multiplied by beta.

    The plain estimator is the one used throughout; the beta factor is an
    opt-in variant of the fluctuation-dissipation normalization.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape[0] < 2:
        raise ContractError("susceptibility needs at least two samples")
    chi = float(n * np.var(samples, ddof=1))
    if beta is not None:
        chi *= beta
    return chi


def mattis_chi_theory(w: float, w_c: float) -> float:
    """Critical susceptibility branch 4 / (w_c^2 - w^2) for {0,1} variables."""
    if not 0.0 <= w < w_c:
        raise ContractError(f"theory curve defined for 0 <= w < w_c, got w={w}")
    return 4.0 / (w_c * w_c - w * w)


def effective_beta(w: float, convention=SpinConvention.BINARY01) -> float:
    """Inverse temperature equivalent of a singular value: w^2/16 for {0,1}
    couplings (critical at w=4), w^2 for Ising ones (critical at 1)."""
    if w < 0:
        raise ContractError("singular values are nonnegative")
    return w * w / 16.0 if convention is SpinConvention.BINARY01 else w * w


# ---------------------------------------------------------------------------
# annealed checkpoint scans


@dataclass
class ScanRecord:
    update_index: int
    epoch: float
    w_alpha: np.ndarray         # singular values (n_modes,)
    mean_m: np.ndarray          # visible-mode means
    chi_m: np.ndarray           # visible-mode susceptibilities
    mean_mbar: np.ndarray
    chi_mbar: np.ndarray
    overlap: np.ndarray         # |u_a . eta_a| against reference directions
    m_samples: np.ndarray | None = None   # (n_chains, n_scatter) projections
    tau_exp: float = math.nan


def anneal_scan(run_dir, n_chains: int = 1000,
                n_sweeps: int = DEFAULT_SCAN_SWEEPS, direction: str = "cooling",
                seed: int = 0, n_modes: int = DEFAULT_N_MODES,
                reference_directions: np.ndarray | None = None,
                keep_samples_modes: int = 2,
                heating_start: str = "ones") -> list[ScanRecord]:
    """Walk a run's checkpoints carrying an equilibrated chain ensemble.

    cooling: ascending training time from random chains; heating: descending
    from single-cluster chains at the most-trained model.  The heating start
    is all visible units up ("ones", the protocol default, which lands in one
    cluster when the first mode has uniform sign as in image-like data) or
    the upper state wherever the first singular vector is positive
    ("aligned", the single-cluster start for sign-mixed modes).  At each
    checkpoint the chains get ``n_sweeps`` Gibbs sweeps and every observable
    is recorded.
    """
    if direction not in ("cooling", "heating"):
        raise ContractError("direction must be 'cooling' or 'heating'")
    if heating_start not in ("ones", "aligned"):
        raise ContractError("heating_start must be 'ones' or 'aligned'")
    run_dir = Path(run_dir)
    manifest = load_manifest(run_dir)
    entries = manifest["checkpoints"]
    if not entries:
        raise ContractError("run has no checkpoints")
    for e in entries:
        if not (run_dir / e["model_file"]).exists():
            raise ContractError(f"missing checkpoint file {e['model_file']}")
    ordered = sorted(entries, key=lambda e: e["update_index"])
    if direction == "heating":
        ordered = ordered[::-1]

    first_model = load_model(run_dir / ordered[0]["model_file"])
    if direction == "cooling":
        ens = random_ensemble(first_model, n_chains, seed, rngmod.TAG_SCAN)
    elif heating_start == "ones":
        ens = aligned_ensemble(first_model, n_chains, seed, rngmod.TAG_SCAN)
    else:
        u1 = svd_of_weights(first_model).left[:, 0]
        ens = aligned_ensemble(first_model, n_chains, seed, rngmod.TAG_SCAN)
        lo = first_model.convention.lo
        ens.visible = np.where(u1 > 0, 1.0, lo)[None, :].repeat(n_chains, axis=0)

    records = []
    for entry in ordered:
        model = load_model(run_dir / entry["model_file"])
        gibbs_sweep(model, ens, n_sweeps)
        records.append(_measure(model, ens, entry, n_modes,
                                reference_directions, keep_samples_modes))
    if direction == "heating":
        records = records[::-1]
    return records


def _measure(model, ens, entry, n_modes, reference_directions, keep_samples_modes):
    svd = svd_of_weights(model)
    k = min(n_modes, svd.values.shape[0])
    m, mbar = mode_magnetizations(ens.visible, ens.hidden, svd, k)
    chi_m = np.array([susceptibility(m[:, a], model.n_visible) for a in range(k)])
    chi_mbar = np.array([susceptibility(mbar[:, a], model.n_hidden) for a in range(k)])
    if reference_directions is not None:
        r = min(k, reference_directions.shape[1])
        overlap = np.abs(np.einsum("ia,ia->a", svd.left[:, :r],
                                   reference_directions[:, :r]))
        overlap = np.concatenate([overlap, np.full(k - r, math.nan)])
    else:
        overlap = np.full(k, math.nan)
    keep = min(keep_samples_modes, k)
    return ScanRecord(
        update_index=entry["update_index"], epoch=entry["epoch"],
        w_alpha=svd.values[:k].copy(), mean_m=m.mean(axis=0),
        chi_m=chi_m, mean_mbar=mbar.mean(axis=0), chi_mbar=chi_mbar,
        overlap=overlap, m_samples=m[:, :keep].copy() if keep else None)


def scan_to_rows(records: list[ScanRecord]):
    """Flatten scan records to (update_index, epoch, alpha, ...) rows."""
    rows = []
    for rec in records:
        for a in range(rec.w_alpha.shape[0]):
            rows.append({
                "update_index": rec.update_index, "epoch": rec.epoch,
                "alpha": a + 1, "w_alpha": rec.w_alpha[a],
                "mean_m_alpha": rec.mean_m[a], "chi_m_alpha": rec.chi_m[a],
                "mean_mbar_alpha": rec.mean_mbar[a], "chi_mbar_alpha": rec.chi_mbar[a],
                "overlap_alpha": rec.overlap[a], "tau_exp": rec.tau_exp,
            })
    return rows


def crossing_update(records: list[ScanRecord], alpha: int, level: float):
    """First (log-interpolated) update index where w_alpha crosses ``level``."""
    t = np.array([r.update_index for r in records], dtype=np.float64)
    w = np.array([r.w_alpha[alpha - 1] if alpha - 1 < len(r.w_alpha) else 0.0
                  for r in records])
    above = np.nonzero(w >= level)[0]
    if above.size == 0:
        return math.inf
    j = above[0]
    if j == 0:
        return float(t[0])
    # interpolate in (log t, w)
    x0, x1 = math.log(t[j - 1]), math.log(t[j])
    w0, w1 = w[j - 1], w[j]
    x = x0 + (level - w0) * (x1 - x0) / (w1 - w0)
    return math.exp(x)


def chi_peak(records: list[ScanRecord], alpha: int = 1):
    """Peak of chi_m vs w_alpha with parabolic refinement; returns (w, chi)."""
    w = np.array([r.w_alpha[alpha - 1] for r in records])
    chi = np.array([r.chi_m[alpha - 1] for r in records])
    j = int(np.argmax(chi))
    if 0 < j < len(w) - 1 and w[j - 1] < w[j] < w[j + 1]:
        x0, x1, x2 = w[j - 1], w[j], w[j + 1]
        y0, y1, y2 = np.log(chi[j - 1]), np.log(chi[j]), np.log(chi[j + 1])
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
        b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
        if a < 0:
            xp = -b / (2 * a)
            if x0 <= xp <= x2:
                return float(xp), float(chi[j])
    return float(w[j]), float(chi[j])


# ---------------------------------------------------------------------------
# finite-size scaling


@dataclass(frozen=True)
class CollapseResult:
    points: list                    # per size: dict with N, x, y, branch arrays
    spread: float                   # mean of the per-branch spreads
    spread_below: float             # sub-critical branch only
    spread_above: float
    spread_raw: float
    beta_c: float
    exponent_y: float
    exponent_x: float


def _interp_spread(curves):
    """Mean squared vertical distance between curves on log10 y, over the
    overlapping x-range (union grid, linear interpolation)."""
    usable = [(np.asarray(x), np.asarray(y)) for x, y in curves
              if len(x) >= 2]
    if len(usable) < 2:
        return math.nan
    lo = max(x.min() for x, _ in usable)
    hi = min(x.max() for x, _ in usable)
    if not hi > lo:
        return math.nan
    grid = np.unique(np.concatenate([x[(x >= lo) & (x <= hi)] for x, _ in usable]))
    if grid.size == 0:
        return math.nan
    logy = []
    for x, y in usable:
        order = np.argsort(x)
        logy.append(np.interp(grid, x[order], np.log10(np.maximum(y[order], 1e-300))))
    logy = np.stack(logy)
    return float(np.mean(np.var(logy, axis=0)))


def fss_collapse(curves, beta_c: float, gamma: float = 1.0, nu: float = 0.5,
                 d_u: float = 4.0, x_max: float | None = None) -> CollapseResult:
    """Rescale (beta, chi) curves with mean-field exponents and score the collapse.

    ``curves`` is a list of (N, beta_array, chi_array) with N the effective
    size.  Collapsed coordinates are x = N^(1/(nu d_u)) |beta - beta_c| and
    y = chi / N^(gamma/(nu d_u)); the spread metric is computed per branch
    (below/above beta_c) and averaged, and also for the raw curves.  With
    ``x_max`` given, all spreads are restricted to the scaling window
    x <= x_max (far from criticality chi is non-universal and neither raw
    nor collapsed curves are expected to line up).
    """
    if len(curves) < 2:
        raise ContractError("collapse needs at least two sizes")
    ey = gamma / (nu * d_u)
    ex = 1.0 / (nu * d_u)
    points = []
    below, above, raw = [], [], []
    for n_eff, beta, chi in curves:
        beta = np.asarray(beta, dtype=np.float64)
        chi = np.asarray(chi, dtype=np.float64)
        x = n_eff ** ex * np.abs(beta - beta_c)
        y = chi / n_eff ** ey
        branch = np.where(beta < beta_c, -1, 1)
        points.append({"N": n_eff, "x": x, "y": y, "branch": branch})
        keep = np.ones_like(x, dtype=bool) if x_max is None else x <= x_max
        lo_mask = (branch < 0) & keep
        hi_mask = (branch > 0) & keep
        if lo_mask.sum() >= 2:
            below.append((x[lo_mask], y[lo_mask]))
        if hi_mask.sum() >= 2:
            above.append((x[hi_mask], y[hi_mask]))
        if keep.sum() >= 2:
            raw.append((beta[keep], chi[keep]))
    s_below = _interp_spread(below)
    s_above = _interp_spread(above)
    spreads = [s for s in (s_below, s_above) if not math.isnan(s)]
    spread = float(np.mean(spreads)) if spreads else math.nan
    return CollapseResult(points, spread, s_below, s_above, _interp_spread(raw),
                          beta_c, ey, ex)


def fit_critical_coupling(curves_w, grid=None, convention=SpinConvention.BINARY01,
                          x_max: float = 5.0):
    """Grid-fit of the first critical singular value by collapse quality.

    ``curves_w`` is a list of (N, w1_array, chi_array); each candidate w_c
    is converted to beta_c = effective_beta(w_c) and the candidate with the
    smallest sub-critical collapsed spread in the scaling window wins (the
    branch and region where the scaling form holds at accessible sizes).
    """
    if grid is None:
        grid = np.arange(3.5, 6.0001, 0.05)
    curves = [(n, effective_beta_array(w, convention), chi)
              for n, w, chi in curves_w]
    best = (math.inf, float(grid[0]))
    for w_c in grid:
        res = fss_collapse(curves, effective_beta(float(w_c), convention),
                           x_max=x_max)
        if not math.isnan(res.spread_below) and res.spread_below < best[0]:
            best = (res.spread_below, float(w_c))
    return best[1], best[0]


def effective_beta_array(w, convention=SpinConvention.BINARY01):
    w = np.asarray(w, dtype=np.float64)
    return w * w / 16.0 if convention is SpinConvention.BINARY01 else w * w


def fit_divergence_coupling(w1, chi, grid=None, w_lo: float = 0.2,
                            frac_hi: float = 0.92):
    """Least-squares fit of the critical coupling on the rising branch.

    Minimizes the squared log-residual of chi against 4/(w_c^2 - w^2) over
    points with w_lo <= w <= frac_hi * w_c (the finite-size-rounded top is
    excluded, it falls below the diverging form).  Returns (w_c, rms).
    """
    if grid is None:
        grid = np.arange(3.5, 6.0001, 0.05)
    w1 = np.asarray(w1, dtype=np.float64)
    chi = np.asarray(chi, dtype=np.float64)
    best = (math.inf, float(grid[0]))
    for w_c in grid:
        mask = (w1 >= w_lo) & (w1 <= frac_hi * w_c) & (chi > 0)
        if mask.sum() < 5:
            continue
        theory = 4.0 / (w_c * w_c - w1[mask] ** 2)
        resid = np.log(chi[mask]) - np.log(theory)
        rms = float(np.sqrt(np.mean(resid ** 2)))
        if rms < best[0]:
            best = (rms, float(w_c))
    return best[1], best[0]


# ---------------------------------------------------------------------------
# relaxation times


@dataclass(frozen=True)
class RelaxationResult:
    tau_exp: float
    flag: str                  # "ok", "decorrelated", "lower-bound"
    autocorr: np.ndarray


def autocorrelation(series: np.ndarray, max_lag: int) -> np.ndarray:
    """Chain-averaged normalized autocorrelation, direct sums, per-chain mean
    removed.  ``series`` has shape (n_sweeps, n_chains)."""
    x = series - series.mean(axis=0, keepdims=True)
    n = x.shape[0]
    denom = np.sum(x * x, axis=0)
    denom = np.where(denom <= 0, 1.0, denom)
    out = np.empty(max_lag + 1)
    for lag in range(max_lag + 1):
        num = np.sum(x[:n - lag] * x[lag:], axis=0)
        out[lag] = np.mean(num / denom) * n / max(n - lag, 1)
    return out / out[0] if out[0] != 0 else out


def relaxation_time(model: RbmModel, n_chains: int = 64, max_sweeps: int = 4000,
                    burn_in: int = 500, seed: int = 0,
                    fit_lo: float = 0.05, fit_hi: float = 0.5) -> RelaxationResult:
    """Exponential autocorrelation time of the first-mode magnetization.

    Chains are equilibrated, then the per-sweep series of m_1 is recorded
    and the tail of the averaged autocorrelation is fit on the window
    C(t) in [fit_lo, fit_hi].  A series that decorrelates within one sweep
    reports tau = 1 ("decorrelated"); no decay inside the window reports
    the window length ("lower-bound").
    """
    svd = svd_of_weights(model)
    u1 = svd.left[:, 0]
    ens = random_ensemble(model, n_chains, seed, rngmod.TAG_RELAX)
    gibbs_sweep(model, ens, burn_in)
    series = np.empty((max_sweeps, n_chains))
    for t in range(max_sweeps):
        gibbs_sweep(model, ens, 1)
        series[t] = ens.visible @ u1 / math.sqrt(model.n_visible)
    max_lag = max_sweeps // 4
    corr = autocorrelation(series, max_lag)
    lags = np.arange(max_lag + 1)
    below = np.nonzero(corr < fit_lo)[0]
    end = below[0] if below.size else max_lag + 1
    window = (lags >= 1) & (lags < end) & (corr <= fit_hi) & (corr >= fit_lo)
    if end <= 1 or corr[1] < fit_lo:
        return RelaxationResult(1.0, "decorrelated", corr)
    if window.sum() < 2:
        # decay too fast to resolve inside the window: single-point estimate
        if 0 < corr[1] < 1:
            return RelaxationResult(-1.0 / math.log(corr[1]), "ok", corr)
        return RelaxationResult(1.0, "decorrelated", corr)
    if not below.size:
        return RelaxationResult(float(max_lag), "lower-bound", corr)
    slope = np.polyfit(lags[window], np.log(corr[window]), 1)[0]
    if slope >= 0:
        return RelaxationResult(float(max_lag), "lower-bound", corr)
    return RelaxationResult(-1.0 / slope, "ok", corr)
