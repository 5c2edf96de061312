"""Maximum-likelihood training with persistent / data / random chain schemes.

The gradient of the mean log-likelihood is estimated as

    dW = <v h>_data - <v h>_chains,   db = <v> - <v>,   dc = <h> - <h>,

where the data side uses exact conditional hidden means and the model side
uses the chain states after k Gibbs sweeps.  The schemes differ only in how
chains are initialized at each update: "pcd" carries them across updates,
"cd" restarts them at the minibatch, "rdm" restarts them uniformly at random.
Checkpoints are spaced uniformly in log(update index) and carry everything
needed to continue a run bit-exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .enumeration import exact_enumeration
from .errors import ContractError, NumericalAbort
from .model import HiddenKind, RbmModel, SpinConvention, hidden_mean
from .modelio import ensemble_from_state, save_model, save_state
from .sampling import ChainEnsemble, gibbs_sweep, random_ensemble

SCHEMES = ("pcd", "cd", "rdm")


@dataclass(frozen=True)
class TrainConfig:
    scheme: str = "pcd"
    k: int = 100
    learning_rate: float = 0.01
    minibatch_size: int = 500
    n_chains: int = 0              # 0 -> same as minibatch_size
    epochs: int = 1
    checkpoint_count: int = 50
    seed: int = 0
    update_biases: bool = True
    weight_init_std: float = 1e-4  # divided by sqrt(n_visible)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ContractError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.k < 1:
            raise ContractError("k must be >= 1")
        if self.learning_rate <= 0:
            raise ContractError("learning_rate must be positive")
        if self.minibatch_size < 1 or self.epochs < 1 or self.checkpoint_count < 1:
            raise ContractError("minibatch_size, epochs, checkpoint_count must be >= 1")

    @property
    def chains(self) -> int:
        return self.n_chains if self.n_chains > 0 else self.minibatch_size


@dataclass
class Checkpoint:
    update_index: int
    epoch: float
    model: RbmModel
    model_file: str | None = None
    state_file: str | None = None


@dataclass
class TrainResult:
    checkpoints: list
    model: RbmModel
    ensemble: ChainEnsemble
    grad_norms: np.ndarray      # (n_updates, 3) columns |dW|, |db|, |dc|
    aborted_at: int | None = None


def init_model(n_visible: int, n_hidden: int, seed: int,
               convention=SpinConvention.BINARY01,
               hidden_kind=HiddenKind.BINARY,
               weight_init_std: float = 1e-4) -> RbmModel:
    """Small random weights, zero biases; keeps every mode far below critical."""
    gen = rngmod.make_generator(seed, rngmod.TAG_INIT)
    w = gen.normal(0.0, weight_init_std / np.sqrt(n_visible), (n_visible, n_hidden))
    var = 1.0 / n_visible if hidden_kind is HiddenKind.GAUSSIAN else 0.0
    return RbmModel(w, np.zeros(n_visible), np.zeros(n_hidden),
                    convention, hidden_kind, var)


def checkpoint_schedule(total_updates: int, count: int) -> list[int]:
    """Unique update indices spaced uniformly in log, always including 1 and the end."""
    if total_updates < 1:
        raise ContractError("need at least one update")
    if count >= total_updates:
        return list(range(1, total_updates + 1))
    raw = np.exp(np.linspace(0.0, np.log(total_updates), count))
    return sorted(set(int(round(x)) for x in raw) | {1, total_updates})


def gradient_estimate(model: RbmModel, batch: np.ndarray, ensemble: ChainEnsemble,
                      scheme: str, k: int):
    """One stochastic gradient: positive term from the batch, negative from chains.

    The ensemble is advanced in place (k sweeps from its scheme-dependent
    start) so persistent chains carry over to the next call.
    """
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[0] == 0:
        raise ContractError("batch must be a non-empty 2-d array")
    if scheme not in SCHEMES:
        raise ContractError(f"unknown scheme {scheme!r}")
    m = batch.shape[0]
    h_data = hidden_mean(model, batch)
    dw_pos = batch.T @ h_data / m
    db_pos = batch.mean(axis=0)
    dc_pos = h_data.mean(axis=0)

    if scheme == "cd":
        if ensemble.n_chains != m:
            raise ContractError("cd scheme needs n_chains == minibatch_size")
        ensemble.visible = batch.copy()
    elif scheme == "rdm":
        lo = model.convention.lo
        u = ensemble.rng.random(ensemble.visible.shape)
        ensemble.visible = np.where(u < 0.5, 1.0, lo)
    gibbs_sweep(model, ensemble, k)

    v_neg = ensemble.visible
    h_neg = hidden_mean(model, v_neg)
    n_s = ensemble.n_chains
    dw = dw_pos - v_neg.T @ h_neg / n_s
    db = db_pos - v_neg.mean(axis=0)
    dc = dc_pos - h_neg.mean(axis=0)
    return dw, db, dc


def exact_gradient(model: RbmModel, batch: np.ndarray):
    """Gradient with the exact (enumerated) model expectation: the oracle-side
    negative term for small machines."""
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[0] == 0:
        raise ContractError("batch must be a non-empty 2-d array")
    m = batch.shape[0]
    h_data = hidden_mean(model, batch)
    res = exact_enumeration(model, want_joint=False)
    dw = batch.T @ h_data / m - res.moment_vh()
    db = batch.mean(axis=0) - res.mean_visible()
    dc = h_data.mean(axis=0) - res.mean_hidden()
    return dw, db, dc


def _check_dataset(model: RbmModel, dataset: np.ndarray) -> np.ndarray:
    dataset = np.asarray(dataset, dtype=np.float64)
    if dataset.ndim != 2 or dataset.shape[1] != model.n_visible:
        raise ContractError("dataset shape does not match the model")
    allowed = (0.0, 1.0) if model.convention is SpinConvention.BINARY01 else (-1.0, 1.0)
    sample = dataset[:: max(1, dataset.shape[0] // 64)]
    if not np.all(np.isin(sample, allowed)):
        raise ContractError(f"dataset values must be in {allowed} for this model")
    return dataset


def train(dataset: np.ndarray, model0: RbmModel, config: TrainConfig,
          out_dir=None, callback=None, resume_state=None) -> TrainResult:
    """Run stochastic gradient ascent, emitting log-spaced checkpoints.

    ``callback(update_index, model, ensemble)`` runs after every update
    (read-only).  With ``out_dir`` set, checkpoint model/state files and a
    manifest are written.  ``resume_state`` is a state-file path: training
    continues from it and reproduces the uninterrupted run bit-exactly.
    """
    dataset = _check_dataset(model0, dataset)
    n_rows = dataset.shape[0]
    if n_rows < config.minibatch_size:
        raise ContractError("dataset smaller than one minibatch")
    batches_per_epoch = n_rows // config.minibatch_size
    total_updates = batches_per_epoch * config.epochs
    schedule = set(checkpoint_schedule(total_updates, config.checkpoint_count))

    w = model0.weights.copy()
    b = model0.visible_bias.copy()
    c = model0.hidden_bias.copy()
    model = replace(model0, weights=w, visible_bias=b, hidden_bias=c)

    if resume_state is not None:
        ensemble, _, start_update, _ = ensemble_from_state(resume_state)
    else:
        ensemble = random_ensemble(model, config.chains, config.seed, rngmod.TAG_CHAINS)
        start_update = 0

    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    checkpoints: list[Checkpoint] = []
    grad_norms = np.zeros((total_updates, 3))
    eps = config.learning_rate
    update = 0
    aborted = None

    def emit(update_index, epoch):
        snap = replace(model, weights=w.copy(), visible_bias=b.copy(),
                       hidden_bias=c.copy())
        ck = Checkpoint(update_index, epoch, snap)
        if out is not None:
            ck.model_file = f"ckpt_{update_index:08d}.rbmc"
            ck.state_file = f"ckpt_{update_index:08d}.state"
            save_model(snap, out / ck.model_file)
            save_state(out / ck.state_file, ensemble, update_index, epoch)
        checkpoints.append(ck)

    for epoch_i in range(config.epochs):
        # epoch-keyed stream, so a resumed run re-derives the same batch order
        order = rngmod.make_generator(config.seed, rngmod.TAG_BATCH,
                                      epoch_i).permutation(n_rows)
        for batch_i in range(batches_per_epoch):
            update += 1
            if update <= start_update:
                continue
            rows = order[batch_i * config.minibatch_size:(batch_i + 1) * config.minibatch_size]
            batch = dataset[rows]
            dw, db, dc = gradient_estimate(model, batch, ensemble, config.scheme,
                                           config.k)
            w += eps * dw
            if config.update_biases:
                b += eps * db
                c += eps * dc
            grad_norms[update - 1] = (np.linalg.norm(dw), np.linalg.norm(db),
                                      np.linalg.norm(dc))
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))
                    and np.all(np.isfinite(c))):
                aborted = update
                break
            if callback is not None:
                callback(update, model, ensemble)
            if update in schedule:
                emit(update, update / batches_per_epoch)
        if aborted is not None:
            break

    if out is not None:
        _write_manifest(out, config, dataset.shape, checkpoints, aborted)
    result = TrainResult(checkpoints, model, ensemble, grad_norms, aborted)
    if aborted is not None:
        raise TrainAborted(result,
                           f"non-finite parameters at update {aborted}; "
                           f"last good checkpoint: "
                           f"{checkpoints[-1].update_index if checkpoints else 'none'}")
    return result


class TrainAborted(NumericalAbort):
    def __init__(self, result: TrainResult, message: str):
        super().__init__(message)
        self.result = result


def _write_manifest(out: Path, config: TrainConfig, data_shape, checkpoints,
                    aborted):
    doc = {
        "format": "rbmc-run",
        "version": 1,
        "config": {
            "scheme": config.scheme, "k": config.k,
            "learning_rate": config.learning_rate,
            "minibatch_size": config.minibatch_size,
            "n_chains": config.chains, "epochs": config.epochs,
            "checkpoint_count": config.checkpoint_count, "seed": config.seed,
            "update_biases": config.update_biases,
        },
        "dataset": {"n_samples": int(data_shape[0]), "n_visible": int(data_shape[1])},
        "aborted_at": aborted,
        "checkpoints": [
            {"update_index": ck.update_index, "epoch": ck.epoch,
             "model_file": ck.model_file, "state_file": ck.state_file}
            for ck in checkpoints
        ],
    }
    (out / "manifest.json").write_text(json.dumps(doc, sort_keys=True, indent=1))


def write_diagnostics(out_dir, grad_norms: np.ndarray) -> None:
    lines = ["update_index,grad_norm_w,grad_norm_b,grad_norm_c"]
    for i, (gw, gb, gc) in enumerate(grad_norms, start=1):
        lines.append(f"{i},{gw:.17g},{gb:.17g},{gc:.17g}")
    Path(out_dir, "diagnostics.csv").write_text("\n".join(lines) + "\n")


def load_manifest(run_dir):
    path = Path(run_dir) / "manifest.json"
    doc = json.loads(path.read_text())
    if doc.get("format") != "rbmc-run":
        raise ContractError(f"{path} is not a run manifest")
    return doc
