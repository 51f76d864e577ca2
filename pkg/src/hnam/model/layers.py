"""Parameterized building blocks of the forecasting network.

Each layer owns named parameters and exposes a plain ``__call__`` for the
per-network path plus, where needed, a ``stacked`` class method that runs
several sibling layers at once with their parameters stacked along a
leading axis (used to execute all coefficient networks in parallel).
"""

from __future__ import annotations

import numpy as np

from ..tensor import (
    Parameter,
    Tensor,
    conv1d_k3,
    dropout,
    embedding_lookup,
    gelu,
    layer_norm,
    matmul,
    softmax,
    stack,
)
from ..tensor.params import embedding_init, linear_init


class Linear:
    def __init__(self, rng: np.random.Generator, name: str, d_in: int, d_out: int):
        self.w = Parameter(f"{name}.w", linear_init(rng, d_in, (d_in, d_out)))
        self.b = Parameter(f"{name}.b", np.zeros(d_out))

    def __call__(self, x: Tensor) -> Tensor:
        return matmul(x, self.w.tensor) + self.b.tensor

    def parameters(self) -> list[Parameter]:
        return [self.w, self.b]

    @staticmethod
    def stacked(layers: list["Linear"], x: Tensor) -> Tensor:
        # x: [n, B, T, d_in]; each layer's weights broadcast over B
        n = len(layers)
        d_in, d_out = layers[0].w.data.shape
        w = stack([l.w.tensor for l in layers]).reshape(n, 1, d_in, d_out)
        b = stack([l.b.tensor for l in layers]).reshape(n, 1, 1, d_out)
        return matmul(x, w) + b


class Embedding:
    def __init__(self, rng: np.random.Generator, name: str, cardinality: int, d: int):
        self.table = Parameter(f"{name}.table", embedding_init(rng, cardinality, d))

    def __call__(self, codes: np.ndarray) -> Tensor:
        return embedding_lookup(self.table.tensor, codes)

    def parameters(self) -> list[Parameter]:
        return [self.table]


class ContinuousEmbed:
    """Linear-affine projection of a standardized scalar feature to d dims."""

    def __init__(self, rng: np.random.Generator, name: str, d: int):
        self.w = Parameter(f"{name}.w", linear_init(rng, 1, (d,)))
        self.b = Parameter(f"{name}.b", np.zeros(d))

    def __call__(self, values: np.ndarray) -> Tensor:
        return Tensor(values[..., None]) * self.w.tensor + self.b.tensor

    def parameters(self) -> list[Parameter]:
        return [self.w, self.b]


class LayerNormLayer:
    def __init__(self, name: str, d: int, eps: float = 1e-5):
        self.gamma = Parameter(f"{name}.gamma", np.ones(d))
        self.beta = Parameter(f"{name}.beta", np.zeros(d))
        self.eps = eps

    def __call__(self, x: Tensor) -> Tensor:
        return layer_norm(x, self.gamma.tensor, self.beta.tensor, self.eps)

    def parameters(self) -> list[Parameter]:
        return [self.gamma, self.beta]

    @staticmethod
    def stacked(layers: list["LayerNormLayer"], x: Tensor) -> Tensor:
        n = len(layers)
        d = layers[0].gamma.data.shape[0]
        gamma = stack([l.gamma.tensor for l in layers]).reshape(n, 1, 1, d)
        beta = stack([l.beta.tensor for l in layers]).reshape(n, 1, 1, d)
        return layer_norm(x, gamma, beta, layers[0].eps)


class TemporalConvBlock:
    """Causal width-3 conv expanding to d*expansion, gelu, dropout, and a
    projection back to d."""

    def __init__(
        self,
        rng: np.random.Generator,
        name: str,
        d: int,
        expansion: int,
        dropout_rate: float,
    ):
        e = d * expansion
        self.conv_w = Parameter(f"{name}.conv_w", linear_init(rng, 3 * d, (3, d, e)))
        self.conv_b = Parameter(f"{name}.conv_b", np.zeros(e))
        self.proj = Linear(rng, f"{name}.proj", e, d)
        self.dropout_rate = dropout_rate

    def __call__(self, x: Tensor, training: bool, rng) -> Tensor:
        h = conv1d_k3(x, self.conv_w.tensor, self.conv_b.tensor)
        h = dropout(gelu(h), self.dropout_rate, training, rng)
        return self.proj(h)

    def parameters(self) -> list[Parameter]:
        return [self.conv_w, self.conv_b, *self.proj.parameters()]

    @staticmethod
    def stacked(blocks: list["TemporalConvBlock"], x: Tensor, training: bool, rng) -> Tensor:
        n = len(blocks)
        _, d, e = blocks[0].conv_w.data.shape
        w = stack([b.conv_w.tensor for b in blocks]).reshape(n, 1, 3, d, e)
        bias = stack([b.conv_b.tensor for b in blocks]).reshape(n, 1, 1, e)
        h = conv1d_k3(x, w, bias)
        h = dropout(gelu(h), blocks[0].dropout_rate, training, rng)
        return Linear.stacked([b.proj for b in blocks], h)


class Mlp:
    """Projection up by `expansion`, gelu, dropout, projection back."""

    def __init__(
        self,
        rng: np.random.Generator,
        name: str,
        d: int,
        expansion: int,
        dropout_rate: float,
    ):
        self.up = Linear(rng, f"{name}.up", d, d * expansion)
        self.down = Linear(rng, f"{name}.down", d * expansion, d)
        self.dropout_rate = dropout_rate

    def __call__(self, x: Tensor, training: bool, rng) -> Tensor:
        h = dropout(gelu(self.up(x)), self.dropout_rate, training, rng)
        return self.down(h)

    def parameters(self) -> list[Parameter]:
        return [*self.up.parameters(), *self.down.parameters()]

    @staticmethod
    def stacked(blocks: list["Mlp"], x: Tensor, training: bool, rng) -> Tensor:
        h = Linear.stacked([b.up for b in blocks], x)
        h = dropout(gelu(h), blocks[0].dropout_rate, training, rng)
        return Linear.stacked([b.down for b in blocks], h)


def multi_head_attention(q: Tensor, k: Tensor, v: Tensor, n_heads: int) -> Tensor:
    """Scaled dot-product attention per head; heads split the channel axis.

    q: [..., Tq, d]; k, v: [..., Tk, d]. Returns [..., Tq, d].
    """
    d = q.shape[-1]
    d_head = d // n_heads
    scale = 1.0 / np.sqrt(d_head)

    def split(x: Tensor) -> Tensor:
        t = x.shape[-2]
        lead = x.shape[:-2]
        return x.reshape(*lead, t, n_heads, d_head).swapaxes(-3, -2)

    qh, kh, vh = split(q), split(k), split(v)  # [..., H, T, d_head]
    scores = matmul(qh, kh.swapaxes(-1, -2)) * scale
    attn = softmax(scores, axis=-1)
    yh = matmul(attn, vh)  # [..., H, Tq, d_head]
    tq = q.shape[-2]
    lead = q.shape[:-2]
    return yh.swapaxes(-3, -2).reshape(*lead, tq, d)


class AttentionBlock:
    """Temporal-conv Q/K/V projections, multi-head attention, residual MLP."""

    def __init__(
        self,
        rng: np.random.Generator,
        name: str,
        d: int,
        n_heads: int,
        mlp_expansion: int,
        conv_expansion: int,
        dropout_rate: float,
    ):
        self.q_conv = TemporalConvBlock(rng, f"{name}.q_conv", d, conv_expansion, dropout_rate)
        self.k_conv = TemporalConvBlock(rng, f"{name}.k_conv", d, conv_expansion, dropout_rate)
        self.v_conv = TemporalConvBlock(rng, f"{name}.v_conv", d, conv_expansion, dropout_rate)
        self.ln_mid = LayerNormLayer(f"{name}.ln_mid", d)
        self.mlp = Mlp(rng, f"{name}.mlp", d, mlp_expansion, dropout_rate)
        self.n_heads = n_heads

    def __call__(self, q_in: Tensor, kv_in: Tensor, training: bool, rng) -> Tensor:
        q = self.q_conv(q_in, training, rng)
        k = self.k_conv(kv_in, training, rng)
        v = self.v_conv(kv_in, training, rng)
        y = multi_head_attention(q, k, v, self.n_heads)
        return y + self.mlp(self.ln_mid(y), training, rng)

    def parameters(self) -> list[Parameter]:
        return [
            *self.q_conv.parameters(),
            *self.k_conv.parameters(),
            *self.v_conv.parameters(),
            *self.ln_mid.parameters(),
            *self.mlp.parameters(),
        ]

    @staticmethod
    def stacked(blocks: list["AttentionBlock"], q_in: Tensor, kv_in: Tensor, training: bool, rng) -> Tensor:
        q = TemporalConvBlock.stacked([b.q_conv for b in blocks], q_in, training, rng)
        k = TemporalConvBlock.stacked([b.k_conv for b in blocks], kv_in, training, rng)
        v = TemporalConvBlock.stacked([b.v_conv for b in blocks], kv_in, training, rng)
        y = multi_head_attention(q, k, v, blocks[0].n_heads)
        mid = LayerNormLayer.stacked([b.ln_mid for b in blocks], y)
        return y + Mlp.stacked([b.mlp for b in blocks], mid, training, rng)
