"""Checkpoint and resume-state file formats."""

import numpy as np
import pytest

from conftest import small_random_model
from rbmcascade.errors import SchemaError
from rbmcascade.model import HiddenKind, SpinConvention
from rbmcascade.modelio import (ensemble_from_state, load_model, load_state,
                                model_from_json, model_to_json, save_model,
                                save_state)
from rbmcascade.sampling import gibbs_sweep, random_ensemble


def test_model_binary_roundtrip(tmp_path, gen):
    for hidden_kind in (HiddenKind.BINARY, HiddenKind.GAUSSIAN):
        for conv in (SpinConvention.BINARY01, SpinConvention.ISING_PM1):
            model = small_random_model(gen, 5, 3, convention=conv,
                                       hidden_kind=hidden_kind)
            save_model(model, tmp_path / "m.rbmc")
            back = load_model(tmp_path / "m.rbmc")
            assert np.array_equal(back.weights, model.weights)
            assert np.array_equal(back.visible_bias, model.visible_bias)
            assert np.array_equal(back.hidden_bias, model.hidden_bias)
            assert back.convention is conv and back.hidden_kind is hidden_kind
            assert back.hidden_variance == model.hidden_variance


def test_model_file_magic_and_header(tmp_path, gen):
    model = small_random_model(gen, 4, 2)
    save_model(model, tmp_path / "m.rbmc")
    raw = (tmp_path / "m.rbmc").read_bytes()
    assert raw[:4] == b"RBMC"
    import struct
    version, n_v, n_h = struct.unpack("<III", raw[4:16])
    assert (version, n_v, n_h) == (1, 4, 2)


def test_truncated_model_rejected(tmp_path, gen):
    model = small_random_model(gen, 4, 2)
    save_model(model, tmp_path / "m.rbmc")
    raw = (tmp_path / "m.rbmc").read_bytes()
    (tmp_path / "m.rbmc").write_bytes(raw[:-8])
    with pytest.raises(SchemaError, match="truncated"):
        load_model(tmp_path / "m.rbmc")


def test_wrong_magic_rejected(tmp_path):
    (tmp_path / "m.rbmc").write_bytes(b"NOPE" + b"\0" * 64)
    with pytest.raises(SchemaError, match="magic"):
        load_model(tmp_path / "m.rbmc")


def test_json_export_roundtrip(gen):
    model = small_random_model(gen, 3, 2, hidden_kind=HiddenKind.GAUSSIAN)
    back = model_from_json(model_to_json(model))
    assert np.array_equal(back.weights, model.weights)
    assert back.hidden_variance == model.hidden_variance


def test_state_roundtrip_continues_identically(tmp_path, gen):
    model = small_random_model(gen, 6, 4)
    ens = random_ensemble(model, 5, seed=3)
    gibbs_sweep(model, ens, 7)
    save_state(tmp_path / "s.state", ens, update_index=42, epoch=1.5)
    restored, _, update_index, epoch = ensemble_from_state(tmp_path / "s.state")
    assert update_index == 42 and epoch == 1.5
    assert np.array_equal(restored.visible, ens.visible)
    assert np.array_equal(restored.hidden, ens.hidden)
    # both ensembles must continue with identical randomness
    gibbs_sweep(model, ens, 9)
    gibbs_sweep(model, restored, 9)
    assert np.array_equal(restored.visible, ens.visible)
    assert np.array_equal(restored.hidden, ens.hidden)


def test_truncated_state_rejected(tmp_path, gen):
    model = small_random_model(gen, 4, 2)
    ens = random_ensemble(model, 3, seed=4)
    save_state(tmp_path / "s.state", ens, 1, 0.1)
    raw = (tmp_path / "s.state").read_bytes()
    (tmp_path / "s.state").write_bytes(raw[:-5])
    with pytest.raises(SchemaError, match="truncated"):
        load_state(tmp_path / "s.state")
