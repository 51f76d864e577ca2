"""Dense float64 tensors with tape-based reverse-mode automatic differentiation.

Every value is a contiguous row-major float64 numpy buffer. Operations on
tensors that require gradients record closures on the output node; calling
``backward()`` on a scalar loss walks the recorded graph in reverse
topological order and accumulates gradients additively into ``.grad``.
The graph lives only as parent references on output tensors, so it is
dropped as soon as the outputs go out of scope (one tape per step).
"""

from __future__ import annotations

import numpy as np
from scipy.special import erf

from ..errors import ConfigError, ShapeError

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    """A dense n-dimensional float64 array, optionally tracked for autodiff."""

    __slots__ = (
        "data", "grad", "requires_grad", "_parents", "_backward", "_grad_borrowed"
    )

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.ascontiguousarray(np.asarray(data, dtype=np.float64))
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple[Tensor, ...] = ()
        self._backward = None
        self._grad_borrowed = False

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.data.shape}{flag})"

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def zero_grad(self) -> None:
        self.grad = None
        self._grad_borrowed = False

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    # -- graph -----------------------------------------------------------

    def backward(self) -> None:
        """Populate gradients of every reachable tensor with requires_grad.

        The loss must be scalar. Gradients accumulate additively, both
        across multiple uses within a graph and across backward calls.
        """
        if self.data.size != 1:
            raise ShapeError(
                f"backward() needs a scalar loss, got shape {self.data.shape}"
            )
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen and p.requires_grad:
                    stack.append((p, False))

        if self.grad is None:
            self.grad = np.ones_like(self.data)
            self._grad_borrowed = False
        else:
            self.grad = self.grad + np.ones_like(self.data)
            self._grad_borrowed = False
        # a tensor's first gradient contribution is adopted by reference
        # (it may be a buffer shared with another tensor); any further
        # accumulation copies first, so shared buffers are never mutated
        for node in reversed(topo):
            if node._backward is None or node.grad is None:
                continue
            grads = node._backward(node.grad)
            for parent, g in zip(node._parents, grads):
                if g is None or not parent.requires_grad:
                    continue
                if parent.grad is None:
                    parent.grad = g
                    parent._grad_borrowed = True
                elif parent._grad_borrowed:
                    parent.grad = parent.grad + g
                    parent._grad_borrowed = False
                else:
                    parent.grad += g

    # -- operator sugar ----------------------------------------------------

    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __truediv__(self, other):
        return div(self, _wrap(other))

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, _wrap(other))

    def __getitem__(self, key):
        return take(self, key)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def swapaxes(self, a, b):
        return swapaxes(self, a, b)


def _wrap(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _result(data: np.ndarray, parents: tuple[Tensor, ...], backward) -> Tensor:
    out = Tensor(data, requires_grad=any(p.requires_grad for p in parents))
    if out.requires_grad:
        out._parents = parents
        out._backward = backward
    return out


# -- elementwise arithmetic --------------------------------------------------


def add(a: Tensor, b: Tensor) -> Tensor:
    def backward(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(g, b.data.shape)

    return _result(a.data + b.data, (a, b), backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    def backward(g):
        return _unbroadcast(g, a.data.shape), _unbroadcast(-g, b.data.shape)

    return _result(a.data - b.data, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    def backward(g):
        return (
            _unbroadcast(g * b.data, a.data.shape),
            _unbroadcast(g * a.data, b.data.shape),
        )

    return _result(a.data * b.data, (a, b), backward)


def div(a: Tensor, b: Tensor) -> Tensor:
    def backward(g):
        return (
            _unbroadcast(g / b.data, a.data.shape),
            _unbroadcast(-g * a.data / (b.data * b.data), b.data.shape),
        )

    return _result(a.data / b.data, (a, b), backward)


def neg(a: Tensor) -> Tensor:
    def backward(g):
        return (-g,)

    return _result(-a.data, (a,), backward)


def exp(a: Tensor) -> Tensor:
    out_data = np.exp(a.data)

    def backward(g):
        return (g * out_data,)

    return _result(out_data, (a,), backward)


def log(a: Tensor) -> Tensor:
    def backward(g):
        return (g / a.data,)

    return _result(np.log(a.data), (a,), backward)


# -- linear algebra -----------------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Batched matrix product with broadcastable leading dimensions."""
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError(
            f"matmul needs matrices, got shapes {a.data.shape} and {b.data.shape}"
        )
    if a.data.shape[-1] != b.data.shape[-2]:
        raise ShapeError(
            f"matmul inner dimensions disagree: {a.data.shape} @ {b.data.shape}"
        )

    def backward(g):
        ad, bd = a.data, b.data
        k, n = bd.shape[-2], bd.shape[-1]
        ga = np.matmul(g, bd.swapaxes(-1, -2))
        if ga.shape != ad.shape:
            ga = _unbroadcast(ga, ad.shape)
        # weight gradients collapse all broadcast leading dims into one
        # tall GEMM instead of a gufunc loop plus reduction
        if bd.ndim == 2:
            gb = np.matmul(ad.reshape(-1, k).T, g.reshape(-1, n))
        elif (
            bd.ndim == ad.ndim
            and bd.shape[0] == ad.shape[0]
            and all(s == 1 for s in bd.shape[1:-2])
        ):
            slices = [
                np.matmul(ad[i].reshape(-1, k).T, g[i].reshape(-1, n))
                for i in range(bd.shape[0])
            ]
            gb = np.stack(slices).reshape(bd.shape)
        else:
            gb = _unbroadcast(np.matmul(ad.swapaxes(-1, -2), g), bd.shape)
        return ga, gb

    return _result(np.matmul(a.data, b.data), (a, b), backward)


# -- reductions and reshaping -------------------------------------------------


def tsum(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out_data = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if axis is None:
            return (np.broadcast_to(g, a.data.shape).copy(),)
        ax = axis if isinstance(axis, tuple) else (axis,)
        if not keepdims:
            g = np.expand_dims(g, ax)
        return (np.broadcast_to(g, a.data.shape).copy(),)

    return _result(out_data, (a,), backward)


def tmean(a: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    if axis is None:
        count = a.data.size
    else:
        ax = axis if isinstance(axis, tuple) else (axis,)
        count = int(np.prod([a.data.shape[i] for i in ax]))
    return tsum(a, axis=axis, keepdims=keepdims) * (1.0 / count)


def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    def backward(g):
        return (g.reshape(a.data.shape),)

    return _result(a.data.reshape(shape), (a,), backward)


def swapaxes(a: Tensor, ax1: int, ax2: int) -> Tensor:
    def backward(g):
        return (np.ascontiguousarray(g.swapaxes(ax1, ax2)),)

    return _result(np.ascontiguousarray(a.data.swapaxes(ax1, ax2)), (a,), backward)


def _is_basic_index(key) -> bool:
    parts = key if isinstance(key, tuple) else (key,)
    return all(isinstance(p, (int, slice)) or p is Ellipsis for p in parts)


def take(a: Tensor, key) -> Tensor:
    basic = _is_basic_index(key)

    def backward(g):
        buf = np.zeros_like(a.data)
        if basic:
            # basic slicing never aliases, so in-place add is safe and fast
            buf[key] += g
        else:
            np.add.at(buf, key, g)
        return (buf,)

    return _result(a.data[key].copy(), (a,), backward)


def concat(tensors: list[Tensor], axis: int = 0) -> Tensor:
    tensors = [_wrap(t) for t in tensors]
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        return tuple(
            np.ascontiguousarray(
                np.take(g, range(offsets[i], offsets[i + 1]), axis=axis)
            )
            for i in range(len(tensors))
        )

    return _result(
        np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), backward
    )


def stack(tensors: list[Tensor], axis: int = 0) -> Tensor:
    tensors = [_wrap(t) for t in tensors]

    def backward(g):
        parts = np.split(g, len(tensors), axis=axis)
        return tuple(
            np.ascontiguousarray(np.squeeze(p, axis=axis)) for p in parts
        )

    return _result(np.stack([t.data for t in tensors], axis=axis), tuple(tensors), backward)


# -- neural operations ---------------------------------------------------------


def gelu(a: Tensor) -> Tensor:
    """Exact Gaussian-CDF gelu: x * Phi(x)."""
    x = a.data
    phi_cdf = 0.5 * (1.0 + erf(x * _INV_SQRT2))
    out_data = x * phi_cdf

    def backward(g):
        pdf = np.exp(-0.5 * x * x) * _INV_SQRT_2PI
        return (g * (phi_cdf + x * pdf),)

    return _result(out_data, (a,), backward)


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    """Numerically stabilized softmax along `axis`."""
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out_data = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        dot = (g * out_data).sum(axis=axis, keepdims=True)
        return (out_data * (g - dot),)

    return _result(out_data, (a,), backward)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit variance, then affine."""
    if x.data.shape[-1] == 0:
        raise ShapeError("layer_norm over an empty last axis")
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    out_data = gamma.data * xhat + beta.data

    def backward(g):
        dxhat = g * gamma.data
        m1 = dxhat.mean(axis=-1, keepdims=True)
        m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
        dx = inv * (dxhat - m1 - xhat * m2)
        dgamma = _unbroadcast(g * xhat, gamma.data.shape)
        dbeta = _unbroadcast(g, beta.data.shape)
        return dx, dgamma, dbeta

    return _result(out_data, (x, gamma, beta), backward)


def conv1d_k3(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Causal width-3 convolution over the time axis.

    x: [..., time, d_in]; weight: [..., 3, d_in, d_out] with tap 2 on the
    current step; bias: broadcastable to [..., time, d_out]. Two zero
    timesteps are prepended, so output t sees inputs t, t-1, t-2 only.
    """
    steps = x.data.shape[-2]
    if steps < 1:
        raise ShapeError("conv1d_k3 needs at least one timestep")
    xd, wd = x.data, weight.data
    d_in, d_out = wd.shape[-2], wd.shape[-1]
    if xd.shape[-1] != d_in:
        raise ShapeError(
            f"conv1d_k3 channel mismatch: input {xd.shape} vs weight {wd.shape}"
        )
    xpad = np.zeros(xd.shape[:-2] + (steps + 2, d_in))
    xpad[..., 2:, :] = xd
    views = [xpad[..., k : k + steps, :] for k in range(3)]
    out_data = np.matmul(views[0], wd[..., 0, :, :])
    out_data += np.matmul(views[1], wd[..., 1, :, :])
    out_data += np.matmul(views[2], wd[..., 2, :, :])
    out_data = out_data + bias.data

    def backward(g):
        gx_pad = np.zeros_like(xpad)
        for k in range(3):
            gx_pad[..., k : k + steps, :] += np.matmul(
                g, wd[..., k, :, :].swapaxes(-1, -2)
            )
        dx = gx_pad[..., 2:, :].copy()
        if wd.ndim == 3:  # [3, d_in, d_out]
            dw = np.stack(
                [
                    np.matmul(views[k].reshape(-1, d_in).T, g.reshape(-1, d_out))
                    for k in range(3)
                ]
            )
        elif wd.ndim == 5 and wd.shape[1] == 1 and wd.shape[0] == xd.shape[0]:
            # stacked per-network weights [n, 1, 3, d_in, d_out]
            dw = np.stack(
                [
                    np.stack(
                        [
                            np.matmul(
                                views[k][i].reshape(-1, d_in).T,
                                g[i].reshape(-1, d_out),
                            )
                            for k in range(3)
                        ]
                    )
                    for i in range(wd.shape[0])
                ]
            ).reshape(wd.shape)
        else:
            dw = np.stack(
                [
                    _unbroadcast(
                        np.matmul(views[k].swapaxes(-1, -2), g), wd[..., 0, :, :].shape
                    )
                    for k in range(3)
                ],
                axis=-3,
            ).reshape(wd.shape)
        db = _unbroadcast(g, bias.data.shape)
        return dx, dw, db

    return _result(out_data, (x, weight, bias), backward)


def dropout(x: Tensor, p: float, training: bool, rng: np.random.Generator) -> Tensor:
    """Zero elements with probability p and rescale survivors (training only)."""
    if not 0.0 <= p < 1.0:
        raise ConfigError(f"dropout rate must be in [0, 1), got {p}")
    if not training or p == 0.0:
        return x
    # float32 uniforms halve the keystream cost; the p resolution loss
    # (~1e-8) is far below any statistical relevance
    draws = rng.random(x.data.shape, dtype=np.float32)
    mask = (draws >= p) / (1.0 - p)

    def backward(g):
        return (g * mask,)

    return _result(x.data * mask, (x,), backward)


def embedding_lookup(table: Tensor, indices: np.ndarray) -> Tensor:
    """Gather rows of `table`; gradients scatter-add back into the rows."""
    idx = np.asarray(indices)
    if idx.size and (idx.min() < 0 or idx.max() >= table.data.shape[0]):
        bad = int(idx.min()) if idx.min() < 0 else int(idx.max())
        raise ShapeError(
            f"embedding index {bad} out of range for table with "
            f"{table.data.shape[0]} rows"
        )
    idx = idx.astype(np.intp)

    def backward(g):
        rows, dim = table.data.shape
        flat_idx = idx.reshape(-1)
        flat_g = g.reshape(-1, dim)
        buf = np.empty((rows, dim))
        # per-column bincount is much faster than np.add.at row scatter
        for j in range(dim):
            buf[:, j] = np.bincount(flat_idx, weights=flat_g[:, j], minlength=rows)
        return (buf,)

    return _result(table.data[idx], (table,), backward)
