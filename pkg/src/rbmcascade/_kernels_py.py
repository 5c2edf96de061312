"""Pure-Python reference kernels.

These are the fallback twins of the compiled kernels in ``_kernels_cy``.
Arithmetic is performed element by element in exactly the same order as the
Cython code, so both backends produce bit-identical trajectories from the
same pre-drawn random numbers.  They are slow; the package selects them only
when the extension is unavailable (or RBMC_BACKEND=python is set).
"""

from __future__ import annotations

import math


def _logistic(x: float) -> float:
    # overflow-safe, branch structure mirrored in the Cython kernel
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def metropolis_pattern_sweep(v, patterns, overlaps, beta, sites, u):
    """Single-spin Metropolis steps on a multi-pattern quadratic Hamiltonian.

    H(v) = -(beta / 2N) * sum_a (pattern_a . v)^2 with v_i = +-1.
    ``overlaps`` holds pattern_a . v and is updated in place along with ``v``.
    One proposal per entry of ``sites``/``u``; returns the accept count.
    """
    n = v.shape[0]
    n_pat = patterns.shape[0]
    scale = 2.0 * beta / n
    accepted = 0
    for t in range(sites.shape[0]):
        s = sites[t]
        vs = v[s]
        d_e = 0.0
        for a in range(n_pat):
            x = patterns[a, s]
            d_e += x * (vs * overlaps[a] - x)
        d_e *= scale
        if d_e <= 0.0 or u[t] < math.exp(-d_e):
            for a in range(n_pat):
                overlaps[a] -= 2.0 * vs * patterns[a, s]
            v[s] = -vs
            accepted += 1
    return accepted


def gibbs_chain_small(weights, vis_bias, hid_bias, v, h, u, ising, counts):
    """Multi-sweep alternating Gibbs update of one small binary-binary chain.

    Per sweep: hidden units are resampled given v, then visible given h,
    consuming ``u[t, :n_hid]`` then ``u[t, n_hid:]``.  Fields are accumulated
    in ascending index order so the compiled kernel matches bit for bit.
    When ``counts`` is given, the joint state (visible bits low, hidden bits
    high) is tallied after every sweep.
    """
    n_vis = weights.shape[0]
    n_hid = weights.shape[1]
    n_sweeps = u.shape[0]
    hi = 1.0
    lo = -1.0 if ising else 0.0
    gain = 2.0 if ising else 1.0
    for t in range(n_sweeps):
        for a in range(n_hid):
            f = hid_bias[a]
            for i in range(n_vis):
                f += v[i] * weights[i, a]
            h[a] = hi if u[t, a] < _logistic(gain * f) else lo
        for i in range(n_vis):
            g = vis_bias[i]
            for a in range(n_hid):
                g += weights[i, a] * h[a]
            v[i] = hi if u[t, n_hid + i] < _logistic(gain * g) else lo
        if counts is not None:
            idx = 0
            for i in range(n_vis):
                if v[i] == hi:
                    idx += 1 << i
            for a in range(n_hid):
                if h[a] == hi:
                    idx += 1 << (n_vis + a)
            counts[idx] += 1
    return None
