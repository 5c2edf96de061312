#!/usr/bin/env python3
"""Benchmark the compiled kernels against their pure-Python twins.

Run:  python benchmarks/bench_kernels.py

Covers the two loops the extension exists for: sequential single-spin
Metropolis (teacher samplers) and long single-chain Gibbs runs on small
machines (exactness tests).  Chain-ensemble Gibbs sampling is matmul-bound
and runs through numpy/BLAS on either backend, so it is not benchmarked
here.  Besides timing, the script asserts both backends produce identical
output from the same random inputs.
"""

import time

import numpy as np

from rbmcascade import _kernels_py, kernels
from rbmcascade import rng as rngmod


def time_fn(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_metropolis(n=500, steps=1_000_000, beta=1.3):
    gen = rngmod.make_generator(11, 1)
    patterns = np.where(gen.random((2, n)) < 0.5, -1.0, 1.0)
    v0 = np.where(gen.random(n) < 0.5, -1.0, 1.0)
    sites = gen.integers(0, n, steps)
    u = gen.random(steps)

    def run(impl, nsteps):
        v = v0.copy()
        overlaps = patterns @ v
        impl.metropolis_pattern_sweep(v, patterns, overlaps, beta,
                                      sites[:nsteps], u[:nsteps])
        return v

    t_cy, v_cy = time_fn(lambda: run(kernels, steps))
    py_steps = steps // 20          # the python twin is too slow for the full run
    t_py, _ = time_fn(lambda: run(_kernels_py, py_steps), repeat=1)
    t_py *= steps / py_steps
    assert np.array_equal(run(kernels, py_steps), run(_kernels_py, py_steps)), \
        "backends disagree"
    return "metropolis 1e6 steps (n=500, 2 patterns)", t_cy, t_py


def bench_gibbs_chain(n_vis=3, n_hid=2, sweeps=200_000):
    gen = rngmod.make_generator(12, 1)
    w = gen.normal(0, 0.7, (n_vis, n_hid))
    b = gen.normal(0, 0.3, n_vis)
    c = gen.normal(0, 0.3, n_hid)
    u = gen.random((sweeps, n_hid + n_vis))

    def run(impl, nsweeps):
        v = np.ones(n_vis)
        h = np.ones(n_hid)
        counts = np.zeros(1 << (n_vis + n_hid), dtype=np.int64)
        impl.gibbs_chain_small(w, b, c, v, h, u[:nsweeps], False, counts)
        return counts

    t_cy, _ = time_fn(lambda: run(kernels, sweeps))
    py_sweeps = sweeps // 20
    t_py, _ = time_fn(lambda: run(_kernels_py, py_sweeps), repeat=1)
    t_py *= sweeps / py_sweeps
    assert np.array_equal(run(kernels, py_sweeps), run(_kernels_py, py_sweeps)), \
        "backends disagree"
    return f"gibbs chain {sweeps:.0e} sweeps ({n_vis}x{n_hid})", t_cy, t_py


def main():
    print(f"active backend: {kernels.backend_name()}")
    if kernels.backend_name() == "python":
        print("extension not built; timing the python twin against itself")
    print(f"{'kernel':<45} {'selected':>10} {'python':>12} {'speedup':>9}")
    for name, t_sel, t_py in (bench_metropolis(), bench_gibbs_chain()):
        print(f"{name:<45} {t_sel:>9.3f}s {t_py:>10.3f}s* {t_py / t_sel:>8.1f}x")
    print("* python twin timed on a slice and scaled to the full workload")


if __name__ == "__main__":
    main()
