"""Parameter snapshot files.

Layout: 4-byte magic "HNAM", little-endian uint32 format version,
little-endian uint64 manifest length, a UTF-8 JSON manifest (root seed,
config hash, arbitrary metadata, and per-tensor name -> shape -> byte
offset), then one raw little-endian float64 payload holding every tensor
back to back in manifest order.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataError

MAGIC = b"HNAM"
FORMAT_VERSION = 1


def config_hash(config_payload) -> str:
    """Stable hash of a JSON-serializable configuration."""
    blob = json.dumps(config_payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def save_snapshot(
    path: str | Path,
    tensors: dict[str, np.ndarray],
    root_seed: int,
    meta: dict | None = None,
) -> None:
    manifest_tensors = {}
    offset = 0
    chunks = []
    for name, arr in tensors.items():
        arr = np.ascontiguousarray(arr, dtype=np.float64)
        manifest_tensors[name] = {"shape": list(arr.shape), "offset": offset}
        chunk = arr.astype("<f8").tobytes()
        chunks.append(chunk)
        offset += len(chunk)
    meta = meta or {}
    manifest = {
        "format_version": FORMAT_VERSION,
        "root_seed": int(root_seed),
        "config_hash": config_hash(meta),
        "meta": meta,
        "tensors": manifest_tensors,
    }
    header = json.dumps(manifest, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for chunk in chunks:
            fh.write(chunk)


def load_snapshot(path: str | Path) -> tuple[dict[str, np.ndarray], dict]:
    """Read tensors and the manifest back; returns (tensors, manifest)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise DataError(f"{path}: not a parameter snapshot (bad magic {magic!r})")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != FORMAT_VERSION:
            raise DataError(f"{path}: unsupported snapshot version {version}")
        (header_len,) = struct.unpack("<Q", fh.read(8))
        manifest = json.loads(fh.read(header_len).decode())
        payload = fh.read()
    tensors = {}
    for name, entry in manifest["tensors"].items():
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        start = entry["offset"]
        arr = np.frombuffer(payload, dtype="<f8", count=count, offset=start)
        tensors[name] = arr.reshape(shape).astype(np.float64)
    return tensors, manifest


def snapshot_digest(path: str | Path) -> str:
    """Content hash of a snapshot file, used for forecast identifiers."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()[:16]
