"""Field loops along a learned direction: the discontinuous-transition probe.

The model energy is tilted by -h * (u . v) with u a unit vector (the learned
pattern direction) and the field h driven around the closed loop
0 -> h_max -> -h_max -> 0 in increments of 2 h_max / n_loop.  Chains carry
over between field values, getting k sweeps at each; the magnetization
m = u.v / sqrt(N_v) is recorded per chain.  A measure split into two lumps
flips between them with delay (metastability), opening the (h, m) cycle;
a unimodal measure retraces itself and the enclosed area is zero within
chain noise.  The loop area is the shoelace area of the mean cycle, which
equals the mean of per-chain areas; its standard error comes from the
chain-to-chain spread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .errors import ContractError
from .model import RbmModel
from .sampling import gibbs_sweep, random_ensemble

DEFAULT_N_LOOP = 50


@dataclass(frozen=True)
class LoopProtocol:
    direction: np.ndarray          # unit vector in visible space
    h_max: float | None = None     # None -> n_visible ** 0.75
    n_loop: int = DEFAULT_N_LOOP
    k: int = 100
    n_chains: int = 100

    def __post_init__(self):
        u = np.asarray(self.direction, dtype=np.float64)
        norm = np.linalg.norm(u)
        if not math.isclose(norm, 1.0, rel_tol=1e-9):
            raise ContractError("loop direction must have unit norm")
        if self.n_loop < 2 or self.n_loop % 2:
            raise ContractError("n_loop must be a positive even integer")
        if self.k < 1 or self.n_chains < 1:
            raise ContractError("k and n_chains must be >= 1")
        object.__setattr__(self, "direction", u)

    def resolve_h_max(self, n_visible: int) -> float:
        return self.h_max if self.h_max is not None else n_visible ** 0.75

    def field_schedule(self, n_visible: int):
        """h values and leg labels for 0 -> h_max -> -h_max -> 0 (endpoints included)."""
        h_max = self.resolve_h_max(n_visible)
        quarter = self.n_loop // 2
        dh = 2.0 * h_max / self.n_loop
        up = dh * np.arange(0, quarter + 1)
        down = h_max - dh * np.arange(1, self.n_loop + 1)
        back = -h_max + dh * np.arange(1, quarter + 1)
        h = np.concatenate([up, down, back])
        legs = ["up"] * len(up) + ["down"] * len(down) + ["return"] * len(back)
        return h, legs


@dataclass
class HysteresisTrace:
    h: np.ndarray
    legs: list
    mean_m: np.ndarray
    std_m: np.ndarray
    loop_area: float
    loop_area_stderr: float
    m_per_chain: np.ndarray       # (n_points, n_chains)


def shoelace_area(h: np.ndarray, m: np.ndarray) -> float:
    """Signed enclosed area of the closed (h, m) cycle."""
    x = np.concatenate([h, h[:1]])
    y = np.concatenate([m, m[:1]])
    return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))


def run_loop(model: RbmModel, protocol: LoopProtocol, seed: int = 0) -> HysteresisTrace:
    """Drive the field loop and record the magnetization response."""
    u = protocol.direction
    if u.shape[0] != model.n_visible:
        raise ContractError("loop direction length does not match the model")
    h_values, legs = protocol.field_schedule(model.n_visible)
    ens = random_ensemble(model, protocol.n_chains, seed, rngmod.TAG_LOOP)
    sqrt_n = math.sqrt(model.n_visible)
    m = np.empty((len(h_values), protocol.n_chains))
    for j, h in enumerate(h_values):
        gibbs_sweep(model, ens, protocol.k, tilt_field=h * u)
        m[j] = ens.visible @ u / sqrt_n
    areas = np.array([shoelace_area(h_values, m[:, s])
                      for s in range(protocol.n_chains)])
    stderr = float(areas.std(ddof=1) / math.sqrt(protocol.n_chains)) \
        if protocol.n_chains > 1 else math.nan
    return HysteresisTrace(h_values, legs, m.mean(axis=1), m.std(axis=1, ddof=1),
                           float(areas.mean()), stderr, m)
