"""Dataset files and the size-rescaling procedures.

Two interchangeable on-disk formats for binary datasets:

* csv01 — one sample per line, comma-separated 0/1;
* packed — magic "DSET", u32 n_samples, u32 n_visible (little-endian),
  then each row bit-packed LSB-first and padded to a whole byte.

Rescaling builds the size ladder for scaling studies: 1-d (sequence-like)
samples are contracted by a stride-2 window-sum threshold, 2-d (image-like)
samples by bilinear resampling of the 0/1 grid thresholded at one half.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import ContractError, SchemaError

DATASET_MAGIC = b"DSET"


def save_csv01(data: np.ndarray, path) -> None:
    data = _as_binary(data)
    with open(path, "w") as fh:
        for row in data.astype(int):
            fh.write(",".join(map(str, row)) + "\n")


def load_csv01(path) -> np.ndarray:
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise SchemaError(
                    f"{path}: row {lineno} has {len(parts)} values, expected {width}")
            try:
                vals = [int(p) for p in parts]
            except ValueError:
                raise SchemaError(f"{path}: row {lineno} has a non-integer value")
            for col, v in enumerate(vals):
                if v not in (0, 1):
                    raise SchemaError(
                        f"{path}: non-binary value {v} at row {lineno}, column {col + 1}")
            rows.append(vals)
    if not rows:
        return np.zeros((0, 0))
    return np.asarray(rows, dtype=np.float64)


def save_packed(data: np.ndarray, path) -> None:
    data = _as_binary(data)
    n, width = data.shape
    header = DATASET_MAGIC + struct.pack("<II", n, width)
    packed = np.packbits(data.astype(np.uint8), axis=1, bitorder="little")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(packed.tobytes())


def load_packed(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != DATASET_MAGIC:
        raise SchemaError(f"{path}: not a packed dataset (bad magic)")
    n, width = struct.unpack("<II", raw[4:12])
    row_bytes = (width + 7) // 8
    need = 12 + n * row_bytes
    if len(raw) != need:
        raise SchemaError(f"{path}: truncated (have {len(raw)} bytes, need {need})")
    if n == 0:
        return np.zeros((0, width))
    body = np.frombuffer(raw, dtype=np.uint8, offset=12).reshape(n, row_bytes)
    bits = np.unpackbits(body, axis=1, bitorder="little")[:, :width]
    return bits.astype(np.float64)


def load_dataset(path, fmt: str | None = None):
    """Load either format; fmt is sniffed from the file when not given.

    Returns (matrix of 0/1 floats, format name).
    """
    path = Path(path)
    if fmt is None:
        with open(path, "rb") as fh:
            magic = fh.read(4)
        fmt = "packed" if magic == DATASET_MAGIC else "csv01"
    if fmt == "packed":
        return load_packed(path), fmt
    if fmt == "csv01":
        return load_csv01(path), fmt
    raise ContractError(f"unknown dataset format {fmt!r}")


def _as_binary(data) -> np.ndarray:
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ContractError("dataset must be 2-d (samples x units)")
    if not np.all(np.isin(data, (0.0, 1.0))):
        raise ContractError("dataset values must be 0/1 (convert spins first)")
    return data


def write_manifest(path, n_samples: int, n_visible: int, height=None, width=None,
                   provenance: str = "", extra: dict | None = None) -> None:
    doc = {"format": "rbmc-dataset", "n_samples": int(n_samples),
           "n_visible": int(n_visible), "provenance": provenance}
    if height is not None:
        doc["height"] = int(height)
        doc["width"] = int(width)
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1))


def read_manifest(path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "rbmc-dataset":
        raise SchemaError(f"{path} is not a dataset manifest")
    return doc


# ---------------------------------------------------------------------------
# size rescaling


def rescale_sequence(data: np.ndarray, kernel: int = 3, threshold: int = 2,
                     stride: int = 2) -> np.ndarray:
    """Halve 1-d samples: stride-2 windows of up to ``kernel`` sites, output 1
    where the window sum reaches ``threshold``.

    Windows start at even offsets and keep at least two sites, so a trailing
    truncated window is included; the output length is ceil((n-1)/2), which
    reproduces the ladder 805 -> 402 -> 201.
    """
    data = _as_binary(data)
    n = data.shape[1]
    if n < kernel:
        raise ContractError(f"samples shorter than the kernel ({n} < {kernel})")
    starts = np.arange(0, n - 1, stride)
    out = np.zeros((data.shape[0], starts.shape[0]))
    for j, s in enumerate(starts):
        window = data[:, s:s + kernel]
        out[:, j] = (window.sum(axis=1) >= threshold).astype(np.float64)
    return out


def rescale_image(data: np.ndarray, old_hw, new_hw) -> np.ndarray:
    """Bilinear resample of 0/1 images to a new grid, thresholded at 0.5
    (ties round to 1).  Pixel-center convention, deterministic."""
    data = _as_binary(data)
    h_old, w_old = int(old_hw[0]), int(old_hw[1])
    h_new, w_new = int(new_hw[0]), int(new_hw[1])
    if h_new < 1 or w_new < 1:
        raise ContractError("target dimensions must be positive")
    if data.shape[1] != h_old * w_old:
        raise ContractError("sample length does not match old height*width")
    imgs = data.reshape(-1, h_old, w_old)

    def _axis_coords(n_new, n_old):
        x = (np.arange(n_new) + 0.5) * (n_old / n_new) - 0.5
        x = np.clip(x, 0.0, n_old - 1.0)
        lo = np.floor(x).astype(int)
        hi = np.minimum(lo + 1, n_old - 1)
        frac = x - lo
        return lo, hi, frac

    r_lo, r_hi, r_f = _axis_coords(h_new, h_old)
    c_lo, c_hi, c_f = _axis_coords(w_new, w_old)
    top = imgs[:, r_lo][:, :, c_lo] * (1 - c_f) + imgs[:, r_lo][:, :, c_hi] * c_f
    bot = imgs[:, r_hi][:, :, c_lo] * (1 - c_f) + imgs[:, r_hi][:, :, c_hi] * c_f
    interp = top * (1 - r_f)[None, :, None] + bot * r_f[None, :, None]
    out = (interp >= 0.5).astype(np.float64)
    return out.reshape(-1, h_new * w_new)
