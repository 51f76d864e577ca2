"""Input validation helpers shared by the estimator facade."""

from __future__ import annotations

from datetime import date

import numpy as np

from .errors import DataError


def check_array_1d(y, name: str = "y") -> np.ndarray:
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DataError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


def check_date(value, name: str = "date") -> date:
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(str(value))
    except ValueError as exc:
        raise DataError(f"{name} must be an ISO date, got {value!r}") from exc


def check_fitted(estimator, attributes: tuple[str, ...]) -> None:
    missing = [a for a in attributes if getattr(estimator, a, None) is None]
    if missing:
        raise DataError(
            f"{type(estimator).__name__} is not fitted yet (missing {missing}); "
            "call fit() first"
        )


def check_horizon(horizon: int) -> int:
    horizon = int(horizon)
    if horizon < 1:
        raise DataError(f"horizon must be >= 1, got {horizon}")
    return horizon
