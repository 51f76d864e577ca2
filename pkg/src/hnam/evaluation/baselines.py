"""Statistical control baselines: seasonal naive and additive Holt-Winters."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ..errors import DataError

logger = logging.getLogger(__name__)


def seasonal_naive(history: np.ndarray, m: int = 7, horizon: int = 14) -> np.ndarray:
    """forecast[t] = history[-m + (t mod m)]."""
    history = np.asarray(history, dtype=np.float64)
    if len(history) < m:
        raise DataError(f"seasonal naive needs at least {m} observations")
    last = history[-m:]
    return np.array([last[t % m] for t in range(horizon)])


@dataclass
class EtsParams:
    """Additive-error, additive-trend, additive-seasonal smoothing state."""

    alpha: float
    beta: float
    gamma: float
    m: int
    level: float
    trend: float
    seasonal: np.ndarray  # [m], sums to zero at initialization

    sse: float = 0.0
    n_fitted: int = 0


def _initial_states(y: np.ndarray, m: int) -> tuple[float, float, np.ndarray]:
    """Classical decomposition of the first two seasons."""
    m1 = float(y[:m].mean())
    m2 = float(y[m : 2 * m].mean())
    trend = (m2 - m1) / m
    # linear trend through the two season means, then averaged residuals
    t = np.arange(2 * m, dtype=np.float64)
    fitted = m1 + trend * (t - (m - 1) / 2.0)
    resid = y[: 2 * m] - fitted
    seasonal = np.array([resid[j::m].mean() for j in range(m)])
    seasonal = seasonal - seasonal.mean()  # additive states sum to zero
    level = m1 - trend * (m - 1) / 2.0 - trend  # state one step before y[0]
    return level, trend, seasonal


def _run_scalar(
    y: np.ndarray, alpha: float, beta: float, gamma: float, m: int,
    l0: float, b0: float, s0: np.ndarray,
) -> tuple[float, float, float, np.ndarray]:
    """One pass of the additive recursion; returns (sse, level, trend, seasonal)."""
    level, trend = l0, b0
    seasonal = [float(v) for v in s0]
    sse = 0.0
    for t in range(len(y)):
        s_idx = t % m
        prev = level + trend
        err = y[t] - (prev + seasonal[s_idx])
        sse += err * err
        new_level = alpha * (y[t] - seasonal[s_idx]) + (1.0 - alpha) * prev
        trend = beta * (new_level - level) + (1.0 - beta) * trend
        seasonal[s_idx] = gamma * (y[t] - prev) + (1.0 - gamma) * seasonal[s_idx]
        level = new_level
    return sse, level, trend, np.array(seasonal)


def _run_grid(
    y: np.ndarray, alphas: np.ndarray, betas: np.ndarray, gammas: np.ndarray,
    m: int, l0: float, b0: float, s0: np.ndarray,
) -> np.ndarray:
    """Vectorized SSE across candidate parameter vectors (same recursion)."""
    k = len(alphas)
    level = np.full(k, l0)
    trend = np.full(k, b0)
    seasonal = np.tile(s0[:, None], (1, k))
    sse = np.zeros(k)
    for t in range(len(y)):
        s_idx = t % m
        prev = level + trend
        err = y[t] - (prev + seasonal[s_idx])
        sse += err * err
        new_level = alphas * (y[t] - seasonal[s_idx]) + (1.0 - alphas) * prev
        trend = betas * (new_level - level) + (1.0 - betas) * trend
        seasonal[s_idx] = gammas * (y[t] - prev) + (1.0 - gammas) * seasonal[s_idx]
        level = new_level
    return sse


_GRID = np.array([0.02, 0.1, 0.3, 0.6, 0.9])


def holt_winters_fit(history: np.ndarray, m: int = 7) -> EtsParams:
    """Smoothing weights minimizing one-step-ahead in-sample squared error.

    Coarse grid search (vectorized) picks the simplex start; Nelder-Mead
    refines within (0, 1) bounds. Falls back to the grid optimum if the
    refined objective is non-finite or worse.
    """
    y = np.asarray(history, dtype=np.float64)
    if len(y) < 2 * m + 10:
        raise DataError(
            f"holt-winters needs at least {2 * m + 10} observations, got {len(y)}"
        )
    l0, b0, s0 = _initial_states(y, m)

    aa, bb, gg = np.meshgrid(_GRID, _GRID, _GRID, indexing="ij")
    aa, bb, gg = aa.ravel(), bb.ravel(), gg.ravel()
    grid_sse = _run_grid(y, aa, bb, gg, m, l0, b0, s0)
    best = int(np.argmin(grid_sse))
    start = np.array([aa[best], bb[best], gg[best]])
    grid_best_sse = float(grid_sse[best])

    def objective(params):
        a, b, g = params
        sse, _, _, _ = _run_scalar(y, a, b, g, m, l0, b0, s0)
        return sse

    result = minimize(
        objective,
        start,
        method="Nelder-Mead",
        bounds=[(1e-4, 0.9999)] * 3,
        options={"maxiter": 300, "xatol": 1e-4, "fatol": 1e-8},
    )
    if np.isfinite(result.fun) and result.fun <= grid_best_sse:
        alpha, beta, gamma = (float(v) for v in result.x)
    else:
        logger.warning("holt-winters refinement rejected; keeping grid optimum")
        alpha, beta, gamma = (float(v) for v in start)

    sse, level, trend, seasonal = _run_scalar(y, alpha, beta, gamma, m, l0, b0, s0)
    return EtsParams(
        alpha=alpha, beta=beta, gamma=gamma, m=m,
        level=level, trend=trend, seasonal=seasonal,
        sse=sse, n_fitted=len(y),
    )


def holt_winters_update(params: EtsParams, history: np.ndarray) -> EtsParams:
    """Re-run the recursion over `history` with fixed smoothing weights.

    Used per forecast origin: states absorb all data up to the origin while
    the weights stay those fitted for the test month.
    """
    y = np.asarray(history, dtype=np.float64)
    l0, b0, s0 = _initial_states(y, params.m)
    sse, level, trend, seasonal = _run_scalar(
        y, params.alpha, params.beta, params.gamma, params.m, l0, b0, s0
    )
    return EtsParams(
        alpha=params.alpha, beta=params.beta, gamma=params.gamma, m=params.m,
        level=level, trend=trend, seasonal=seasonal, sse=sse, n_fitted=len(y),
    )


def holt_winters_forecast(params: EtsParams, horizon: int) -> np.ndarray:
    """Standard additive extrapolation of the fitted states."""
    m = params.m
    out = np.empty(horizon)
    for h in range(1, horizon + 1):
        season = params.seasonal[(params.n_fitted + h - 1) % m]
        out[h - 1] = params.level + h * params.trend + season
    return out
