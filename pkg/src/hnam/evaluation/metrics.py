"""Forecast error metrics."""

from __future__ import annotations

import numpy as np

from ..errors import DataError


def smape(actuals: np.ndarray, predictions: np.ndarray) -> float:
    """Mean of 2|y - yhat| / (|y| + |yhat|), in [0, 2].

    Steps where both values are zero contribute 0 (the 0/0 convention).
    """
    y = np.asarray(actuals, dtype=np.float64)
    yhat = np.asarray(predictions, dtype=np.float64)
    if y.size == 0:
        raise DataError("smape of empty input")
    if y.shape != yhat.shape:
        raise DataError(f"smape shapes disagree: {y.shape} vs {yhat.shape}")
    denom = np.abs(y) + np.abs(yhat)
    terms = np.zeros_like(denom)
    nz = denom > 0
    terms[nz] = 2.0 * np.abs(y - yhat)[nz] / denom[nz]
    return float(terms.mean())


def standardized_errors(
    actuals: np.ndarray, predictions: np.ndarray, series_std: float
) -> tuple[float, float]:
    """(MAE / std, RMSE / std) for one series."""
    y = np.asarray(actuals, dtype=np.float64)
    yhat = np.asarray(predictions, dtype=np.float64)
    if y.size == 0:
        raise DataError("standardized_errors of empty input")
    if y.shape != yhat.shape:
        raise DataError(f"shapes disagree: {y.shape} vs {yhat.shape}")
    if series_std <= 0:
        raise DataError("series standard deviation must be positive")
    err = y - yhat
    mae = float(np.abs(err).mean())
    rmse = float(np.sqrt((err * err).mean()))
    return mae / series_std, rmse / series_std


def truncate_predictions(predictions: np.ndarray) -> np.ndarray:
    """Negative predictions are clipped to zero before scoring."""
    return np.maximum(np.asarray(predictions, dtype=np.float64), 0.0)
