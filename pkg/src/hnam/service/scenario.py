"""What-if scenarios and judgmental adjustments over composed forecasts."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path

import numpy as np

from ..errors import DataError
from ..model import ComposedForecast, recompose_prediction


@dataclass
class Override:
    covariate: str
    step: int
    value: float


@dataclass
class Scenario:
    series: str
    origin: date
    overrides: list[Override] = field(default_factory=list)

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        try:
            overrides = [
                Override(str(o["covariate"]), int(o["step"]), float(o["value"]))
                for o in d.get("overrides", [])
            ]
            return cls(
                series=str(d["series"]),
                origin=date.fromisoformat(d["origin"]),
                overrides=overrides,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed scenario: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "v": 1,
            "series": self.series,
            "origin": self.origin.isoformat(),
            "overrides": [
                {"covariate": o.covariate, "step": o.step, "value": o.value}
                for o in self.overrides
            ],
        }


@dataclass
class Adjustment:
    """Per-step additive deltas or multiplicative factors on one component."""

    target: str  # "level" or a causal covariate name
    mode: str  # "add" | "multiply"
    values: list[float]  # one per horizon step
    author: str = ""
    note: str = ""
    timestamp: str = ""

    def __post_init__(self):
        if self.mode not in ("add", "multiply"):
            raise DataError(f"adjustment mode must be add|multiply, got {self.mode!r}")
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat()

    @classmethod
    def from_dict(cls, d: dict) -> "Adjustment":
        try:
            return cls(
                target=str(d["target"]),
                mode=str(d["mode"]),
                values=[float(v) for v in d["values"]],
                author=str(d.get("author", "")),
                note=str(d.get("note", "")),
                timestamp=str(d.get("timestamp", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed adjustment: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "v": 1,
            "target": self.target,
            "mode": self.mode,
            "values": list(self.values),
            "author": self.author,
            "note": self.note,
            "timestamp": self.timestamp,
        }


def recompose(forecast: ComposedForecast, adjustment: Adjustment) -> ComposedForecast:
    """Apply an adjustment to one component; everything else untouched.

    Pure: returns a new forecast, the original is preserved. The adjusted
    prediction is recomputed as level + sum of effects.
    """
    if len(adjustment.values) != forecast.horizon:
        raise DataError(
            f"adjustment carries {len(adjustment.values)} steps, "
            f"horizon is {forecast.horizon}"
        )
    values = np.asarray(adjustment.values, dtype=np.float64)
    level = forecast.level.copy()
    effects = forecast.effects.copy()
    if adjustment.target == "level":
        level = level + values if adjustment.mode == "add" else level * values
    elif adjustment.target in forecast.covariate_names:
        row = forecast.covariate_names.index(adjustment.target)
        if adjustment.mode == "add":
            effects[row] = effects[row] + values
        else:
            effects[row] = effects[row] * values
    else:
        raise DataError(
            f"unknown adjustment target {adjustment.target!r}; expected 'level' "
            f"or one of {forecast.covariate_names}"
        )
    prediction = recompose_prediction(level, effects)
    return ComposedForecast(
        horizon=forecast.horizon,
        covariate_names=list(forecast.covariate_names),
        level=level,
        effects=effects,
        coefficients=[c.copy() for c in forecast.coefficients],
        prediction=prediction,
        truncated_prediction=np.maximum(prediction, 0.0),
        actuals=None if forecast.actuals is None else forecast.actuals.copy(),
    )


class AdjustmentLog:
    """Append-only, line-delimited adjustment records keyed by forecast id."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def append(self, forecast_id: str, adjustment: Adjustment) -> None:
        record = {"forecast_id": forecast_id, "adjustment": adjustment.to_dict()}
        with open(self.path, "a") as fh:
            fh.write(json.dumps(record) + "\n")

    def entries(self, forecast_id: str | None = None) -> list[dict]:
        if not self.path.exists():
            return []
        out = []
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                if forecast_id is None or record["forecast_id"] == forecast_id:
                    out.append(record)
        return out

    def replay(self, forecast_id: str, base: ComposedForecast) -> ComposedForecast:
        """Apply every logged adjustment for the id, in append order."""
        state = base
        for record in self.entries(forecast_id):
            state = recompose(state, Adjustment.from_dict(record["adjustment"]))
        return state
