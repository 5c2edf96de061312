"""Spin conventions, the bipartite energy model, and exact conditionals.

The model is an energy-based Markov random field on a bipartite graph of
visible spins and hidden units,

    E(v, h) = - v.W.h - b.v - c.h          (binary hidden)
    E(v, h) = - v.W.h - b.v - c.h + sum_a h_a^2 / (2 sigma^2)   (Gaussian hidden)

with visible spins in {0,1} or {-1,+1} depending on the convention.  Both
conventions describe the same family of distributions; ``convert`` maps a
model between them exactly (coupling rescale plus bias compensation).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from .errors import ContractError


class SpinConvention(enum.Enum):
    BINARY01 = "binary01"
    ISING_PM1 = "ising_pm1"

    @property
    def lo(self) -> float:
        return 0.0 if self is SpinConvention.BINARY01 else -1.0

    @property
    def field_gain(self) -> float:
        """Factor multiplying the local field inside the logistic."""
        return 1.0 if self is SpinConvention.BINARY01 else 2.0


class HiddenKind(enum.Enum):
    BINARY = "binary"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class RbmModel:
    """Weights, biases and unit conventions of one machine."""

    weights: np.ndarray          # (n_visible, n_hidden) float64
    visible_bias: np.ndarray     # (n_visible,) float64
    hidden_bias: np.ndarray      # (n_hidden,) float64
    convention: SpinConvention = SpinConvention.BINARY01
    hidden_kind: HiddenKind = HiddenKind.BINARY
    hidden_variance: float = field(default=0.0)   # used only for Gaussian hidden

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        b = np.ascontiguousarray(np.asarray(self.visible_bias, dtype=np.float64))
        c = np.ascontiguousarray(np.asarray(self.hidden_bias, dtype=np.float64))
        if w.ndim != 2:
            raise ContractError("weights must be a 2-d matrix")
        if b.shape != (w.shape[0],) or c.shape != (w.shape[1],):
            raise ContractError(
                f"bias shapes {b.shape}/{c.shape} do not match weights {w.shape}")
        for name, arr in (("weights", w), ("visible_bias", b), ("hidden_bias", c)):
            if not np.all(np.isfinite(arr)):
                raise ContractError(f"{name} contains non-finite entries")
        if self.hidden_kind is HiddenKind.GAUSSIAN:
            if not (np.isfinite(self.hidden_variance) and self.hidden_variance > 0):
                raise ContractError("Gaussian hidden units need a positive variance")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "visible_bias", b)
        object.__setattr__(self, "hidden_bias", c)

    @property
    def n_visible(self) -> int:
        return self.weights.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.weights.shape[1]

    def require_theory_variance(self):
        """Gaussian-hidden analysis assumes variance 1/n_visible (extensivity)."""
        if self.hidden_kind is not HiddenKind.GAUSSIAN:
            return
        if not np.isclose(self.hidden_variance, 1.0 / self.n_visible, rtol=1e-12, atol=0.0):
            raise ContractError(
                f"theory mode requires hidden variance 1/N_v = {1.0 / self.n_visible!r}, "
                f"got {self.hidden_variance!r}")


def zero_model(n_visible, n_hidden, convention=SpinConvention.BINARY01,
               hidden_kind=HiddenKind.BINARY, hidden_variance=0.0) -> RbmModel:
    if hidden_kind is HiddenKind.GAUSSIAN and hidden_variance == 0.0:
        hidden_variance = 1.0 / n_visible
    return RbmModel(np.zeros((n_visible, n_hidden)), np.zeros(n_visible),
                    np.zeros(n_hidden), convention, hidden_kind, hidden_variance)


def _check_spins(model, v):
    v = np.asarray(v, dtype=np.float64)
    allowed = (0.0, 1.0) if model.convention is SpinConvention.BINARY01 else (-1.0, 1.0)
    if not np.all(np.isin(v, allowed)):
        raise ContractError(f"visible states must be in {allowed}")
    return v


def energy(model: RbmModel, v, h) -> float:
    """Energy of one joint configuration."""
    v = np.asarray(v, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if v.shape != (model.n_visible,) or h.shape != (model.n_hidden,):
        raise ContractError(
            f"configuration shapes {v.shape}/{h.shape} do not match model "
            f"({model.n_visible}, {model.n_hidden})")
    e = -float(v @ model.weights @ h) - float(model.visible_bias @ v) \
        - float(model.hidden_bias @ h)
    if model.hidden_kind is HiddenKind.GAUSSIAN:
        e += float(h @ h) / (2.0 * model.hidden_variance)
    return e


def hidden_fields(model: RbmModel, v: np.ndarray) -> np.ndarray:
    """Local fields on the hidden layer, v may be a batch (…, n_visible)."""
    return np.asarray(v, dtype=np.float64) @ model.weights + model.hidden_bias


def visible_fields(model: RbmModel, h: np.ndarray) -> np.ndarray:
    return np.asarray(h, dtype=np.float64) @ model.weights.T + model.visible_bias


def conditional_hidden(model: RbmModel, v):
    """Parameters of p(h | v), factorized over hidden units.

    Binary hidden: probability of the upper state (1 or +1).
    Gaussian hidden: (mean, variance) with mean = sigma^2 * field.
    """
    f = hidden_fields(model, v)
    if model.hidden_kind is HiddenKind.GAUSSIAN:
        return model.hidden_variance * f, model.hidden_variance
    return expit(model.convention.field_gain * f)


def conditional_visible(model: RbmModel, h):
    """Probability of the upper visible state given hidden values."""
    return expit(model.convention.field_gain * visible_fields(model, h))


def hidden_mean(model: RbmModel, v):
    """E[h | v]; the conditional hidden expectation used by gradients."""
    if model.hidden_kind is HiddenKind.GAUSSIAN:
        mean, _ = conditional_hidden(model, v)
        return mean
    p = conditional_hidden(model, v)
    if model.convention is SpinConvention.ISING_PM1:
        return 2.0 * p - 1.0
    return p


def convert(model: RbmModel, target: SpinConvention) -> RbmModel:
    """Exact re-parametrization of the model in the other spin convention.

    Mapping both layers through s = 2v - 1 gives, for binary hidden,
    W01 = 4 Wpm with compensating bias shifts; the Boltzmann distribution
    over mapped states is unchanged.  With Gaussian hidden units only the
    visible layer changes representation, so the coupling factor is 2.
    """
    if model.convention is target:
        return model
    w, b, c = model.weights, model.visible_bias, model.hidden_bias
    hidden_binary = model.hidden_kind is HiddenKind.BINARY
    ones_v = np.ones(model.n_visible)
    ones_h = np.ones(model.n_hidden)
    if target is SpinConvention.ISING_PM1:
        if hidden_binary:
            w2, b2, c2 = w / 4.0, b / 2.0 + w @ ones_h / 4.0, c / 2.0 + w.T @ ones_v / 4.0
        else:
            w2, b2, c2 = w / 2.0, b / 2.0, c + w.T @ ones_v / 2.0
    else:
        if hidden_binary:
            w2 = 4.0 * w
            b2 = 2.0 * b - w2 @ ones_h / 2.0
            c2 = 2.0 * c - w2.T @ ones_v / 2.0
        else:
            w2 = 2.0 * w
            b2 = 2.0 * b
            c2 = c - w2.T @ ones_v / 2.0
    return replace(model, weights=w2, visible_bias=b2, hidden_bias=c2, convention=target)


def map_states(v, source: SpinConvention, target: SpinConvention):
    """Map spin states between conventions (v -> 2v-1 or back)."""
    v = np.asarray(v, dtype=np.float64)
    if source is target:
        return v
    if target is SpinConvention.ISING_PM1:
        return 2.0 * v - 1.0
    return (v + 1.0) / 2.0


def rank_one_model(w1: float, u: np.ndarray, ubar: np.ndarray,
                   convention=SpinConvention.BINARY01) -> RbmModel:
    """Binary-binary machine with a single singular value and symmetric lumps.

    Builds W = w1 * u ubar^T (w1 in the units of ``convention``) with the
    bias compensation that makes the equivalent Ising model bias-free, so the
    two condensed lumps are exactly symmetric.  Critical at w1 = 4 for {0,1}
    couplings, w1 = 1 for Ising ones.
    """
    u = np.asarray(u, dtype=np.float64)
    ubar = np.asarray(ubar, dtype=np.float64)
    u = u / np.linalg.norm(u)
    ubar = ubar / np.linalg.norm(ubar)
    w = w1 * np.outer(u, ubar)
    if convention is SpinConvention.ISING_PM1:
        b = np.zeros(u.shape[0])
        c = np.zeros(ubar.shape[0])
    else:
        b = -w @ np.ones(ubar.shape[0]) / 2.0
        c = -w.T @ np.ones(u.shape[0]) / 2.0
    return RbmModel(w, b, c, convention, HiddenKind.BINARY)
