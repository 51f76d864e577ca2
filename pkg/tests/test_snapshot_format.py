"""Byte-level contract of the parameter snapshot file."""

import json
import struct

import numpy as np
import pytest

from hnam.errors import DataError
from hnam.tensor.snapshot import load_snapshot, save_snapshot


def test_header_layout(tmp_path):
    path = tmp_path / "m.hnam"
    a = np.arange(6, dtype=np.float64).reshape(2, 3)
    b = np.array([7.5])
    save_snapshot(path, {"w": a, "b": b}, root_seed=42, meta={"note": "x"})

    raw = path.read_bytes()
    assert raw[:4] == b"HNAM"
    (version,) = struct.unpack("<I", raw[4:8])
    assert version == 1
    (header_len,) = struct.unpack("<Q", raw[8:16])
    manifest = json.loads(raw[16 : 16 + header_len].decode())
    assert manifest["root_seed"] == 42
    assert manifest["format_version"] == 1
    assert len(manifest["config_hash"]) == 16
    assert manifest["tensors"]["w"] == {"shape": [2, 3], "offset": 0}
    assert manifest["tensors"]["b"]["offset"] == 6 * 8

    payload = raw[16 + header_len :]
    decoded = np.frombuffer(payload, dtype="<f8", count=6).reshape(2, 3)
    assert np.array_equal(decoded, a)


def test_roundtrip_preserves_values(tmp_path):
    path = tmp_path / "m.hnam"
    rng = np.random.default_rng(0)
    tensors = {f"p{i}": rng.normal(size=(i + 1, 3)) for i in range(4)}
    save_snapshot(path, tensors, root_seed=7)
    loaded, manifest = load_snapshot(path)
    for name, arr in tensors.items():
        assert np.array_equal(loaded[name], arr)
    assert manifest["root_seed"] == 7


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(DataError, match="magic"):
        load_snapshot(path)


def test_config_hash_tracks_meta(tmp_path):
    p1, p2 = tmp_path / "a.hnam", tmp_path / "b.hnam"
    arr = {"w": np.ones(2)}
    save_snapshot(p1, arr, 0, meta={"config": {"d": 8}})
    save_snapshot(p2, arr, 0, meta={"config": {"d": 16}})
    _, m1 = load_snapshot(p1)
    _, m2 = load_snapshot(p2)
    assert m1["config_hash"] != m2["config_hash"]


def test_optimizer_step_counter_strictly_increases():
    from hnam.tensor import AdamW, Parameter

    p = Parameter("w", np.ones(3))
    opt = AdamW([p], lr=0.01)
    seen = []
    for _ in range(4):
        p.tensor.grad = np.ones(3)
        opt.step()
        seen.append(opt.step_count)
    assert seen == [1, 2, 3, 4]
