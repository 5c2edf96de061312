"""Model checkpoint files (binary + JSON) and trainer resume state.

Checkpoint layout (little-endian):

    magic   4 bytes  "RBMC"
    version u32      (currently 1)
    N_v     u32
    N_h     u32
    conv    u8       0 = binary {0,1}, 1 = Ising {-1,+1}
    hkind   u8       0 = binary hidden, 1 = Gaussian hidden
    var     f64      hidden variance (0.0 for binary hidden)
    W       f64 * N_v*N_h, row-major
    b       f64 * N_v
    c       f64 * N_h

Resume-state layout ("RBMS"): header, chain spins, then the JSON-encoded
RNG states required to continue a run bit-exactly.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .model import HiddenKind, RbmModel, SpinConvention
from .sampling import ChainEnsemble
from . import rng as rngmod

MODEL_MAGIC = b"RBMC"
STATE_MAGIC = b"RBMS"
MODEL_VERSION = 1

_CONV_CODE = {SpinConvention.BINARY01: 0, SpinConvention.ISING_PM1: 1}
_CONV_FROM = {v: k for k, v in _CONV_CODE.items()}
_HK_CODE = {HiddenKind.BINARY: 0, HiddenKind.GAUSSIAN: 1}
_HK_FROM = {v: k for k, v in _HK_CODE.items()}


def save_model(model: RbmModel, path) -> None:
    header = MODEL_MAGIC + struct.pack(
        "<IIIBBd", MODEL_VERSION, model.n_visible, model.n_hidden,
        _CONV_CODE[model.convention], _HK_CODE[model.hidden_kind],
        float(model.hidden_variance))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(model.weights, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(model.visible_bias, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(model.hidden_bias, dtype="<f8").tobytes())


def load_model(path) -> RbmModel:
    raw = Path(path).read_bytes()
    head_len = 4 + struct.calcsize("<IIIBBd")
    if len(raw) < head_len or raw[:4] != MODEL_MAGIC:
        raise SchemaError(f"{path}: not a model checkpoint (bad magic)")
    version, n_v, n_h, conv, hk, var = struct.unpack("<IIIBBd", raw[4:head_len])
    if version != MODEL_VERSION:
        raise SchemaError(f"{path}: unsupported version {version}")
    expect = head_len + 8 * (n_v * n_h + n_v + n_h)
    if len(raw) != expect:
        raise SchemaError(f"{path}: truncated (have {len(raw)} bytes, need {expect})")
    body = np.frombuffer(raw, dtype="<f8", offset=head_len)
    w = body[:n_v * n_h].reshape(n_v, n_h)
    b = body[n_v * n_h:n_v * n_h + n_v]
    c = body[n_v * n_h + n_v:]
    return RbmModel(w.copy(), b.copy(), c.copy(), _CONV_FROM[conv], _HK_FROM[hk], var)


def model_to_json(model: RbmModel) -> str:
    doc = {
        "format": "rbmc-model",
        "version": MODEL_VERSION,
        "n_visible": model.n_visible,
        "n_hidden": model.n_hidden,
        "convention": model.convention.value,
        "hidden_kind": model.hidden_kind.value,
        "hidden_variance": model.hidden_variance,
        "weights": model.weights.tolist(),
        "visible_bias": model.visible_bias.tolist(),
        "hidden_bias": model.hidden_bias.tolist(),
    }
    return json.dumps(doc, sort_keys=True)


def model_from_json(text: str) -> RbmModel:
    doc = json.loads(text)
    if doc.get("format") != "rbmc-model":
        raise SchemaError("not a JSON model export")
    return RbmModel(np.asarray(doc["weights"], dtype=np.float64),
                    np.asarray(doc["visible_bias"], dtype=np.float64),
                    np.asarray(doc["hidden_bias"], dtype=np.float64),
                    SpinConvention(doc["convention"]),
                    HiddenKind(doc["hidden_kind"]),
                    float(doc["hidden_variance"]))


def save_state(path, ensemble: ChainEnsemble, update_index: int, epoch: float,
               extra_rng: dict[str, str] | None = None) -> None:
    """Persist chain spins plus RNG states for bit-exact resume."""
    v = np.ascontiguousarray(ensemble.visible, dtype="<f8")
    h = np.ascontiguousarray(ensemble.hidden, dtype="<f8")
    rng_doc = {"chains": ensemble.state_json()}
    if extra_rng:
        rng_doc.update(extra_rng)
    blob = json.dumps(rng_doc, sort_keys=True).encode()
    header = STATE_MAGIC + struct.pack(
        "<IQdIIII", MODEL_VERSION, update_index, float(epoch),
        v.shape[0], v.shape[1], h.shape[1], len(blob))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(v.tobytes())
        fh.write(h.tobytes())
        fh.write(blob)


def load_state(path):
    """Return (visible, hidden, rng_docs, update_index, epoch)."""
    raw = Path(path).read_bytes()
    head_len = 4 + struct.calcsize("<IQdIIII")
    if len(raw) < head_len or raw[:4] != STATE_MAGIC:
        raise SchemaError(f"{path}: not a resume-state file")
    version, update_index, epoch, n_s, n_v, n_h, blob_len = struct.unpack(
        "<IQdIIII", raw[4:head_len])
    if version != MODEL_VERSION:
        raise SchemaError(f"{path}: unsupported version {version}")
    need = head_len + 8 * n_s * (n_v + n_h) + blob_len
    if len(raw) != need:
        raise SchemaError(f"{path}: truncated (have {len(raw)} bytes, need {need})")
    off = head_len
    v = np.frombuffer(raw, dtype="<f8", count=n_s * n_v, offset=off).reshape(n_s, n_v)
    off += 8 * n_s * n_v
    h = np.frombuffer(raw, dtype="<f8", count=n_s * n_h, offset=off).reshape(n_s, n_h)
    off += 8 * n_s * n_h
    rng_doc = json.loads(raw[off:].decode())
    return v.copy(), h.copy(), rng_doc, update_index, epoch


def ensemble_from_state(path) -> tuple[ChainEnsemble, dict[str, str], int, float]:
    v, h, rng_doc, update_index, epoch = load_state(path)
    ens = ChainEnsemble(v, h, rngmod.state_from_json(rng_doc["chains"]))
    return ens, rng_doc, update_index, epoch
