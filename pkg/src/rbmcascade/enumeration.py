"""Brute-force enumeration of small machines: the test oracle.

Everything here is deliberately independent of the samplers: probabilities
come straight from the energy function summed over all states, so Monte
Carlo estimates, analytic gradients and mean-field formulas elsewhere in
the package can be checked against it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import ContractError, SizeCapError
from .model import HiddenKind, RbmModel, SpinConvention, energy, hidden_fields, hidden_mean

STATE_CAP_BITS = 24


def state_table(n: int, convention: SpinConvention) -> np.ndarray:
    """All 2^n spin configurations, row k = bits of k (LSB = unit 0)."""
    k = np.arange(1 << n, dtype=np.int64)
    bits = ((k[:, None] >> np.arange(n)) & 1).astype(np.float64)
    if convention is SpinConvention.ISING_PM1:
        bits = 2.0 * bits - 1.0
    return bits


def visible_log_weights(model: RbmModel, states: np.ndarray) -> np.ndarray:
    """log sum_h exp(-E(v, h)) for each visible row, hidden layer integrated out."""
    f = hidden_fields(model, states)
    base = states @ model.visible_bias
    if model.hidden_kind is HiddenKind.GAUSSIAN:
        s2 = model.hidden_variance
        return base + 0.5 * s2 * np.sum(f * f, axis=1) \
            + 0.5 * model.n_hidden * np.log(2.0 * np.pi * s2)
    if model.convention is SpinConvention.ISING_PM1:
        return base + np.sum(np.logaddexp(f, -f), axis=1)
    return base + np.sum(np.logaddexp(0.0, f), axis=1)


@dataclass(frozen=True)
class EnumerationResult:
    model: RbmModel
    log_z: float
    visible_states: np.ndarray     # (2^n_visible, n_visible)
    visible_probs: np.ndarray      # (2^n_visible,)
    joint_probs: np.ndarray | None # (2^n_visible, 2^n_hidden) for binary hidden

    def moment_vh(self) -> np.ndarray:
        """Exact <v_i h_a> under the model distribution."""
        h_bar = hidden_mean(self.model, self.visible_states)
        return (self.visible_states * self.visible_probs[:, None]).T @ h_bar

    def mean_visible(self) -> np.ndarray:
        return self.visible_probs @ self.visible_states

    def mean_hidden(self) -> np.ndarray:
        return self.visible_probs @ hidden_mean(self.model, self.visible_states)


def exact_enumeration(model: RbmModel, want_joint: bool = True) -> EnumerationResult:
    """Normalized probability table and log Z for a small machine.

    Binary hidden: enumerates visible states and, when the total state count
    fits the cap, the full joint table.  Gaussian hidden: the hidden layer is
    integrated analytically and only visible states are enumerated.
    """
    n_v, n_h = model.n_visible, model.n_hidden
    if model.hidden_kind is HiddenKind.GAUSSIAN:
        if n_v > STATE_CAP_BITS:
            raise SizeCapError(
                f"2^{n_v} visible states exceeds the 2^{STATE_CAP_BITS} cap")
        joint_ok = False
    else:
        if n_v + n_h > STATE_CAP_BITS:
            raise SizeCapError(
                f"2^{n_v + n_h} joint states exceeds the 2^{STATE_CAP_BITS} cap")
        joint_ok = want_joint
    states = state_table(n_v, model.convention)
    log_w = visible_log_weights(model, states)
    log_z = float(logsumexp(log_w))
    probs = np.exp(log_w - log_z)
    joint = None
    if joint_ok:
        h_states = state_table(n_h, model.convention)
        f = hidden_fields(model, states)     # (2^nv, n_h), includes hidden bias
        log_joint = (states @ model.visible_bias)[:, None] + f @ h_states.T
        joint = np.exp(log_joint - log_z)
    return EnumerationResult(model, log_z, states, probs, joint)


def exact_log_likelihood(model: RbmModel, data: np.ndarray) -> float:
    """Mean log p(v) over the rows of ``data`` (enumeration-backed)."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != model.n_visible:
        raise ContractError("data shape does not match the model")
    res = exact_enumeration(model, want_joint=False)
    return float(np.mean(visible_log_weights(model, data)) - res.log_z)


def joint_probability(model: RbmModel, v, h, log_z: float) -> float:
    return float(np.exp(-energy(model, v, h) - log_z))
