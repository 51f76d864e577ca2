"""Composed forecasts: the additive decomposition shown to analysts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundle import Batch
from .network import ForwardResult


@dataclass
class ComposedForecast:
    """Level plus per-covariate additive effects, in raw sales units.

    prediction is recomputed as level + sum of effects so the decomposition
    identity holds exactly; truncated_prediction clips negatives at zero
    and is the number used for error metrics and serving.
    """

    horizon: int
    covariate_names: list[str]
    level: np.ndarray  # [T_f]
    effects: np.ndarray  # [n_c, T_f]
    coefficients: list[np.ndarray]  # per covariate, [T_f, w_i]
    prediction: np.ndarray  # [T_f]
    truncated_prediction: np.ndarray  # [T_f]
    actuals: np.ndarray | None = None  # [T_f] when known

    def effect(self, name: str) -> np.ndarray:
        return self.effects[self.covariate_names.index(name)]

    def to_dict(self) -> dict:
        out = {
            "v": 1,
            "horizon": self.horizon,
            "covariates": list(self.covariate_names),
            "level": self.level.tolist(),
            "effects": {
                name: self.effects[i].tolist()
                for i, name in enumerate(self.covariate_names)
            },
            "coefficients": {
                name: self.coefficients[i].tolist()
                for i, name in enumerate(self.covariate_names)
            },
            "prediction": self.prediction.tolist(),
            "truncated_prediction": self.truncated_prediction.tolist(),
            "actuals": None if self.actuals is None else self.actuals.tolist(),
        }
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ComposedForecast":
        names = list(d["covariates"])
        return cls(
            horizon=d["horizon"],
            covariate_names=names,
            level=np.asarray(d["level"], dtype=np.float64),
            effects=np.asarray(
                [d["effects"][n] for n in names], dtype=np.float64
            ).reshape(len(names), -1),
            coefficients=[
                np.asarray(d["coefficients"][n], dtype=np.float64) for n in names
            ],
            prediction=np.asarray(d["prediction"], dtype=np.float64),
            truncated_prediction=np.asarray(
                d["truncated_prediction"], dtype=np.float64
            ),
            actuals=(
                None
                if d.get("actuals") is None
                else np.asarray(d["actuals"], dtype=np.float64)
            ),
        )


def recompose_prediction(level: np.ndarray, effects: np.ndarray) -> np.ndarray:
    """level [T_f] + column sums of effects [n_c, T_f], in that order."""
    pred = level.copy()
    for row in effects:
        pred = pred + row
    return pred


def compose_forecasts(
    batch: Batch,
    result: ForwardResult,
    covariate_names: list[str],
    actuals: list[np.ndarray | None] | None = None,
) -> list[ComposedForecast]:
    """Scale the forward outputs back to sales units, one per sample."""
    n_c = len(covariate_names)
    out = []
    level_all = result.level.data
    effects_all = [e.data for e in result.effects]
    coef_all = [c.data for c in result.coefficients]
    for b in range(batch.size):
        scale = float(batch.y_scale[b])
        level = level_all[b] * scale
        effects = np.stack(
            [effects_all[i][b] * scale for i in range(n_c)]
        ) if n_c else np.zeros((0, batch.T_f))
        prediction = recompose_prediction(level, effects)
        out.append(
            ComposedForecast(
                horizon=batch.T_f,
                covariate_names=list(covariate_names),
                level=level,
                effects=effects,
                coefficients=[coef_all[i][b] * scale for i in range(n_c)],
                prediction=prediction,
                truncated_prediction=np.maximum(prediction, 0.0),
                actuals=None if actuals is None else actuals[b],
            )
        )
    return out
