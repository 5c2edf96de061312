"""Dataset file formats and the rescaling ladder."""

import numpy as np
import pytest

from rbmcascade.dataio import (load_csv01, load_dataset, load_packed,
                               read_manifest, rescale_image, rescale_sequence,
                               save_csv01, save_packed, write_manifest)
from rbmcascade.errors import ContractError, SchemaError


def test_empty_csv_gives_zero_samples(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    data, fmt = load_dataset(path)
    assert data.shape[0] == 0 and fmt == "csv01"


def test_csv_roundtrip(tmp_path, gen):
    data = (gen.random((20, 13)) < 0.5).astype(float)
    save_csv01(data, tmp_path / "d.csv")
    back, fmt = load_dataset(tmp_path / "d.csv")
    assert fmt == "csv01" and np.array_equal(back, data)


def test_csv_to_packed_roundtrip_is_identity(tmp_path, gen):
    data = (gen.random((17, 11)) < 0.5).astype(float)
    save_csv01(data, tmp_path / "d.csv")
    loaded, _ = load_dataset(tmp_path / "d.csv")
    save_packed(loaded, tmp_path / "d.dset")
    again, fmt = load_dataset(tmp_path / "d.dset")
    assert fmt == "packed" and np.array_equal(again, data)


def test_bit_packing_lsb_first(tmp_path):
    save_packed(np.array([[1, 0, 1, 1, 0, 0, 0, 0.]]), tmp_path / "x.dset")
    raw = (tmp_path / "x.dset").read_bytes()
    assert raw[:4] == b"DSET"
    assert raw[12] == 0x0D


def test_malformed_rows_reported_with_location(tmp_path):
    (tmp_path / "bad1.csv").write_text("0,1,0\n1,0\n")
    with pytest.raises(SchemaError, match="row 2"):
        load_csv01(tmp_path / "bad1.csv")
    (tmp_path / "bad2.csv").write_text("0,1,0\n1,0,2\n")
    with pytest.raises(SchemaError, match="row 2, column 3"):
        load_csv01(tmp_path / "bad2.csv")


def test_truncated_packed_rejected(tmp_path, gen):
    data = (gen.random((8, 20)) < 0.5).astype(float)
    save_packed(data, tmp_path / "t.dset")
    raw = (tmp_path / "t.dset").read_bytes()
    (tmp_path / "t.dset").write_bytes(raw[:-3])
    with pytest.raises(SchemaError, match="truncated"):
        load_packed(tmp_path / "t.dset")


def test_manifest_roundtrip(tmp_path):
    write_manifest(tmp_path / "m.json", 100, 64, height=8, width=8,
                   provenance="unit test")
    doc = read_manifest(tmp_path / "m.json")
    assert doc["n_samples"] == 100 and doc["height"] == 8


def test_rescale_sequence_hand_values():
    out = rescale_sequence(np.array([[1, 1, 0, 0, 0, 1, 1.]]))
    assert np.array_equal(out, np.array([[1, 0, 1.]]))
    assert np.array_equal(rescale_sequence(np.ones((2, 7))), np.ones((2, 3)))
    assert np.array_equal(rescale_sequence(np.zeros((2, 9))), np.zeros((2, 4)))


def test_rescale_sequence_genome_ladder():
    x = np.ones((1, 805))
    once = rescale_sequence(x)
    twice = rescale_sequence(once)
    assert once.shape[1] == 402 and twice.shape[1] == 201


def test_rescale_sequence_too_short_rejected():
    with pytest.raises(ContractError):
        rescale_sequence(np.ones((1, 2)))


def test_rescale_sequence_density_roughly_preserved(gen):
    data = (gen.random((200, 401)) < 0.5).astype(float)
    out = rescale_sequence(data)
    assert abs(out.mean() - data.mean()) < 0.1


def test_rescale_image_identity():
    img = (np.arange(36) % 3 == 0).astype(float)[None, :]
    assert np.array_equal(rescale_image(img, (6, 6), (6, 6)), img)


def test_rescale_image_checkerboard_roundtrip():
    cb = np.array([[1., 0., 0., 1.]])
    up = rescale_image(cb, (2, 2), (4, 4))
    expect = np.array([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1.]])
    assert np.array_equal(up.reshape(4, 4), expect)
    back = rescale_image(up, (4, 4), (2, 2))
    assert np.array_equal(back, cb)


def test_rescale_image_constant_stays_constant():
    for value in (0.0, 1.0):
        img = np.full((3, 35), value)
        out = rescale_image(img, (5, 7), (9, 11))
        assert np.all(out == value)


def test_rescale_image_rejects_bad_target():
    with pytest.raises(ContractError):
        rescale_image(np.ones((1, 4)), (2, 2), (0, 3))
