"""Backend selection for the hot kernels.

At import time the compiled extension is preferred; the pure-Python twins
are used if it is missing or if ``RBMC_BACKEND=python`` is set.  Both
backends consume identical random inputs and produce bit-identical output,
so the choice only affects speed (see benchmarks/bench_kernels.py).

Note that bulk chain-ensemble Gibbs sampling does not live here: it is
matmul-bound and handled by numpy/BLAS in ``sampling``.  The kernels below
cover the loops BLAS cannot express: sequential single-spin Metropolis and
long single-chain Gibbs runs on small systems.
"""

from __future__ import annotations

import os

from . import _kernels_py

_FORCED = os.environ.get("RBMC_BACKEND", "").strip().lower()

if _FORCED == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _FORCED == "cython":
            raise
        _impl = _kernels_py
        BACKEND = "python"

metropolis_pattern_sweep = _impl.metropolis_pattern_sweep
gibbs_chain_small = _impl.gibbs_chain_small


def backend_name() -> str:
    return BACKEND
