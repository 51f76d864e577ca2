"""Named trainable parameters and initialization helpers."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .core import Tensor


class Parameter:
    """A tensor with a hierarchical name, always tracked for gradients."""

    __slots__ = ("name", "tensor")

    def __init__(self, name: str, data: np.ndarray):
        self.name = name
        self.tensor = Tensor(data, requires_grad=True)

    @property
    def data(self) -> np.ndarray:
        return self.tensor.data

    @data.setter
    def data(self, value: np.ndarray) -> None:
        self.tensor.data = np.ascontiguousarray(np.asarray(value, dtype=np.float64))

    @property
    def grad(self) -> np.ndarray | None:
        return self.tensor.grad

    def zero_grad(self) -> None:
        self.tensor.grad = None

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.data.shape})"


def check_unique_names(params: list[Parameter]) -> None:
    seen: set[str] = set()
    for p in params:
        if p.name in seen:
            raise ConfigError(f"duplicate parameter name {p.name!r}")
        seen.add(p.name)


def linear_init(rng: np.random.Generator, fan_in: int, shape: tuple[int, ...]) -> np.ndarray:
    """Uniform in +-1/sqrt(fan_in); used for linear and conv weights."""
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def embedding_init(rng: np.random.Generator, rows: int, dim: int) -> np.ndarray:
    """Normal rows with std 1/sqrt(dim)."""
    return rng.normal(0.0, 1.0 / np.sqrt(dim), size=(rows, dim))
