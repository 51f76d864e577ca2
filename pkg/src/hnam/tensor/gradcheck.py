"""Finite-difference gradient verification.

Central differences with a 1e-5 step on float64 give ~1e-9 truncation
error, so analytic gradients are expected to agree to a relative error of
1e-4 or better on well-conditioned functions.
"""

from __future__ import annotations

import numpy as np

from .core import Tensor


def numerical_grad(fn, x: Tensor, step: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of scalar fn() with respect to x.data."""
    grad = np.zeros_like(x.data)
    flat = x.data.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        hi = fn().item()
        flat[i] = orig - step
        lo = fn().item()
        flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * step)
    return grad


def max_relative_error(
    analytic: np.ndarray, numeric: np.ndarray, denom_floor: float = 1e-8
) -> float:
    """max |a - n| / max(denom_floor, |a| + |n|), elementwise.

    A central difference of a loss L cannot resolve gradient components
    below ~|L| * eps / step; callers checking such losses should raise
    denom_floor to that noise envelope divided by their relative
    tolerance, otherwise sub-noise gradients fail spuriously.
    """
    denom = np.maximum(denom_floor, np.abs(analytic) + np.abs(numeric))
    return float(np.max(np.abs(analytic - numeric) / denom))


def fd_noise_floor(loss_value: float, step: float, rtol: float) -> float:
    """Denominator floor hiding differences below fd roundoff resolution."""
    eps = np.finfo(np.float64).eps
    return 10.0 * abs(loss_value) * eps / step / rtol


def check_gradients(fn, inputs: list[Tensor], step: float = 1e-5) -> float:
    """Run fn once with backward(), compare each input grad to differences.

    Returns the worst relative error across all inputs.
    """
    for x in inputs:
        x.zero_grad()
    loss = fn()
    loss.backward()
    worst = 0.0
    for x in inputs:
        assert x.grad is not None, "input did not receive a gradient"
        num = numerical_grad(fn, x, step=step)
        worst = max(worst, max_relative_error(x.grad, num))
    return worst
