"""The value transformation multiplying causal coefficients.

Categorical causal covariates are k-1 one-hot encoded (code 0, the
reference category, maps to the zero vector, forcing its effect to zero);
continuous causal covariates are standardized with statistics fitted on
training data only.
"""

from __future__ import annotations

import numpy as np

from ..errors import DataError, FitError
from .config import CovariateSpec


class ContinuousStats:
    """Per-covariate mean/std fitted on the training region."""

    def __init__(self, stats: dict[str, tuple[float, float]] | None = None):
        self.stats = dict(stats or {})

    @classmethod
    def fit(
        cls,
        values: dict[str, np.ndarray],
        require_variation: tuple[str, ...] = (),
    ) -> "ContinuousStats":
        """Fit from raw training values per covariate name.

        Covariates listed in require_variation (the causal ones, whose
        standardized values multiply coefficients) must have nonzero std;
        others fall back to std 1 so constants pass through harmlessly.
        """
        stats = {}
        for name, arr in values.items():
            arr = np.asarray(arr, dtype=np.float64)
            mean = float(arr.mean()) if arr.size else 0.0
            std = float(arr.std()) if arr.size else 0.0
            if std == 0.0:
                if name in require_variation:
                    raise FitError(
                        f"covariate {name!r} has zero variance in training data"
                    )
                std = 1.0
            stats[name] = (mean, std)
        return cls(stats)

    def standardize(self, name: str, x: np.ndarray) -> np.ndarray:
        mean, std = self.stats[name]
        return (x - mean) / std

    def to_dict(self) -> dict:
        return {k: [v[0], v[1]] for k, v in self.stats.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "ContinuousStats":
        return cls({k: (float(v[0]), float(v[1])) for k, v in d.items()})


def transform_values(
    spec: CovariateSpec, raw: np.ndarray, stats: ContinuousStats
) -> np.ndarray:
    """Map raw causal values [..., steps] to value matrices [..., steps, w].

    Categorical code v -> k-1 vector (zeros for the reference category,
    else a unit at position v-1); continuous x -> (x - mean) / std.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if spec.is_categorical:
        codes = raw.astype(np.int64)
        if np.any(codes < 0) or np.any(codes >= spec.cardinality):
            bad = int(codes.min()) if codes.min() < 0 else int(codes.max())
            raise DataError(
                f"covariate {spec.name!r}: category code {bad} outside "
                f"[0, {spec.cardinality})"
            )
        out = np.zeros(raw.shape + (spec.cardinality - 1,))
        active = codes > 0
        idx = np.nonzero(active)
        out[idx + (codes[active] - 1,)] = 1.0
        return out
    return stats.standardize(spec.name, raw)[..., None]
