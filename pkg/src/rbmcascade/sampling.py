"""Parallel-chain alternating Gibbs sampling.

The RNG consumption contract is fixed so that runs are bit-reproducible:
per sweep, every chain draws its hidden-layer randoms first and then its
visible-layer uniforms, as one (n_chains, n_hidden + n_visible) block for
binary hidden units or a normal block plus a uniform block for Gaussian
ones.  Chain i always occupies row i.  The ensemble path evaluates fields
with BLAS matmuls; a compiled single-chain path takes over for long runs on
small binary machines, where interpreter overhead would dominate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import kernels, rng as rngmod
from .errors import ContractError
from .model import (HiddenKind, RbmModel, SpinConvention, hidden_fields,
                    visible_fields)

# fixed dispatch rule for the compiled single-chain path (shape-only, so the
# same run always takes the same path regardless of backend availability)
_SMALL_CHAIN_UNITS = 64
_SMALL_CHAIN_MIN_SWEEPS = 64
_KERNEL_SWEEP_CHUNK = 4096


@dataclass
class ChainEnsemble:
    """States of n_chains independent Markov chains plus their RNG stream."""

    visible: np.ndarray   # (n_chains, n_visible) float64 spins
    hidden: np.ndarray    # (n_chains, n_hidden) float64 spins or reals
    rng: np.random.Generator

    @property
    def n_chains(self) -> int:
        return self.visible.shape[0]

    def state_json(self) -> str:
        return rngmod.state_to_json(self.rng)

    def copy(self) -> "ChainEnsemble":
        return ChainEnsemble(self.visible.copy(), self.hidden.copy(),
                             rngmod.state_from_json(self.state_json()))


def random_ensemble(model: RbmModel, n_chains: int, seed: int,
                    tag: int = rngmod.TAG_CHAINS) -> ChainEnsemble:
    """Chains with uniform random visible spins; hidden drawn from p(h|v)."""
    gen = rngmod.make_generator(seed, tag)
    lo = model.convention.lo
    v = np.where(gen.random((n_chains, model.n_visible)) < 0.5, 1.0, lo)
    ens = ChainEnsemble(v, np.zeros((n_chains, model.n_hidden)), gen)
    _update_hidden(model, ens)
    return ens


def aligned_ensemble(model: RbmModel, n_chains: int, seed: int,
                     tag: int = rngmod.TAG_CHAINS) -> ChainEnsemble:
    """Chains with every visible unit at its upper state (single-cluster start)."""
    gen = rngmod.make_generator(seed, tag)
    v = np.ones((n_chains, model.n_visible))
    ens = ChainEnsemble(v, np.zeros((n_chains, model.n_hidden)), gen)
    _update_hidden(model, ens)
    return ens


def _check_match(model: RbmModel, ens: ChainEnsemble):
    if ens.visible.shape[1] != model.n_visible or ens.hidden.shape[1] != model.n_hidden:
        raise ContractError(
            f"ensemble shape {ens.visible.shape}/{ens.hidden.shape} does not "
            f"match model ({model.n_visible}, {model.n_hidden})")


def _update_hidden(model: RbmModel, ens: ChainEnsemble,
                   normals: np.ndarray | None = None,
                   uniforms: np.ndarray | None = None):
    f = hidden_fields(model, ens.visible)
    if model.hidden_kind is HiddenKind.GAUSSIAN:
        if normals is None:
            normals = ens.rng.standard_normal(f.shape)
        s2 = model.hidden_variance
        ens.hidden = s2 * f + np.sqrt(s2) * normals
    else:
        if uniforms is None:
            uniforms = ens.rng.random(f.shape)
        p = expit(model.convention.field_gain * f)
        ens.hidden = np.where(uniforms < p, 1.0, model.convention.lo)


def _update_visible(model: RbmModel, ens: ChainEnsemble, uniforms: np.ndarray):
    p = expit(model.convention.field_gain * visible_fields(model, ens.hidden))
    ens.visible = np.where(uniforms < p, 1.0, model.convention.lo)


def gibbs_sweep(model: RbmModel, ens: ChainEnsemble, k: int,
                tilt_field: np.ndarray | None = None) -> ChainEnsemble:
    """k alternating block updates (hidden given visible, then visible).

    ``tilt_field`` adds a per-unit bias to the visible fields only, used by
    the field-loop protocol; it does not touch the model parameters.
    """
    _check_match(model, ens)
    if k == 0:
        return ens
    if k < 0:
        raise ContractError("sweep count must be >= 0")
    n_s, n_v, n_h = ens.n_chains, model.n_visible, model.n_hidden
    gaussian = model.hidden_kind is HiddenKind.GAUSSIAN

    if (not gaussian and tilt_field is None and n_s == 1
            and n_v <= _SMALL_CHAIN_UNITS and n_h <= _SMALL_CHAIN_UNITS
            and k >= _SMALL_CHAIN_MIN_SWEEPS):
        _gibbs_small_chain(model, ens, k, counts=None)
        return ens

    b_eff = model.visible_bias if tilt_field is None else model.visible_bias + tilt_field
    for _ in range(k):
        if gaussian:
            norm = ens.rng.standard_normal((n_s, n_h))
            u_v = ens.rng.random((n_s, n_v))
            _update_hidden(model, ens, normals=norm)
        else:
            block = ens.rng.random((n_s, n_h + n_v))
            _update_hidden(model, ens, uniforms=block[:, :n_h])
            u_v = block[:, n_h:]
        fields = ens.hidden @ model.weights.T + b_eff
        p = expit(model.convention.field_gain * fields)
        ens.visible = np.where(u_v < p, 1.0, model.convention.lo)
    return ens


def _gibbs_small_chain(model: RbmModel, ens: ChainEnsemble, k: int, counts):
    """Compiled path: same RNG stream, fields accumulated index-ascending."""
    ising = model.convention is SpinConvention.ISING_PM1
    v = np.ascontiguousarray(ens.visible[0])
    h = np.ascontiguousarray(ens.hidden[0])
    n_h, n_v = model.n_hidden, model.n_visible
    done = 0
    while done < k:
        n = min(_KERNEL_SWEEP_CHUNK, k - done)
        u = ens.rng.random((n, 1, n_h + n_v)).reshape(n, n_h + n_v)
        kernels.gibbs_chain_small(model.weights, model.visible_bias,
                                  model.hidden_bias, v, h, u, ising, counts)
        done += n
    ens.visible = v[None, :].copy()
    ens.hidden = h[None, :].copy()


def gibbs_chain_histogram(model: RbmModel, n_sweeps: int, seed: int) -> np.ndarray:
    """Joint-state visit counts of one long chain (small binary machines).

    Returns an array of length 2^(n_visible + n_hidden); entry j counts the
    sweeps ending in the state whose visible bits are the low bits of j.
    """
    if model.hidden_kind is not HiddenKind.BINARY:
        raise ContractError("state histogram requires binary hidden units")
    n_bits = model.n_visible + model.n_hidden
    if n_bits > 24:
        raise ContractError("state histogram capped at 2^24 states")
    ens = random_ensemble(model, 1, seed)
    counts = np.zeros(1 << n_bits, dtype=np.int64)
    _gibbs_small_chain(model, ens, n_sweeps, counts)
    return counts
