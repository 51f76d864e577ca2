"""Tensor substrate: float64 arrays, reverse-mode autodiff, AdamW, snapshots."""

from .core import (
    Tensor,
    add,
    concat,
    conv1d_k3,
    div,
    dropout,
    embedding_lookup,
    exp,
    gelu,
    layer_norm,
    log,
    matmul,
    mul,
    neg,
    reshape,
    softmax,
    stack,
    sub,
    swapaxes,
    take,
    tmean,
    tsum,
)
from .optim import AdamW
from .params import Parameter, check_unique_names, embedding_init, linear_init
from .rng import derive_key, stream
from .snapshot import (
    FORMAT_VERSION,
    MAGIC,
    config_hash,
    load_snapshot,
    save_snapshot,
    snapshot_digest,
)

__all__ = [
    "Tensor",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "exp",
    "log",
    "matmul",
    "tsum",
    "tmean",
    "reshape",
    "swapaxes",
    "take",
    "concat",
    "stack",
    "gelu",
    "softmax",
    "layer_norm",
    "conv1d_k3",
    "dropout",
    "embedding_lookup",
    "AdamW",
    "Parameter",
    "check_unique_names",
    "linear_init",
    "embedding_init",
    "derive_key",
    "stream",
    "save_snapshot",
    "load_snapshot",
    "snapshot_digest",
    "config_hash",
    "MAGIC",
    "FORMAT_VERSION",
]
