"""Serving logic over an immutable trained snapshot, transport-agnostic."""

from __future__ import annotations

import hashlib
import threading
from datetime import date
from pathlib import Path

import numpy as np

from ..data.ingest import SeriesKey
from ..data.windows import Panel, batch_from_samples, make_window
from ..errors import DataError, HnamError
from ..model import ComposedForecast, HnamModel, compose_forecasts
from .scenario import Adjustment, AdjustmentLog, Scenario, recompose

class ServiceError(HnamError):
    def __init__(self, error_class: str, message: str, status: int = 400):
        super().__init__(message)
        self.error_class = error_class
        self.status = status

class ForecastService:
    """Pure request handlers; the HTTP layer is a thin shell around this.

    The model snapshot is immutable here: what-if and adjustment requests
    never touch parameters, and adjustments persist only to the log file.
    """

    def __init__(
        self,
        model: HnamModel,
        panel: Panel,
        keys: list[SeriesKey],
        adjustment_log: str | Path,
        snapshot_hash: str = "",
    ):
        self.model = model
        self.panel = panel
        self.keys = keys
        self.log = AdjustmentLog(adjustment_log)
        self.snapshot_hash = snapshot_hash or "unhashed"
        self._write_lock = threading.Lock()
        self._causal_names = [c.name for c in model.config.causal]

    # -- helpers -------------------------------------------------------------

    def forecast_id(self, key: SeriesKey, origin: date) -> str:
        blob = f"{self.snapshot_hash}|{key}|{origin.isoformat()}"
        return hashlib.sha256(blob.encode()).hexdigest()[:24]

    def _resolve_series(self, series: str) -> SeriesKey:
        key = SeriesKey.parse(series)
        if key not in self.panel.tables:
            raise ServiceError("SERIES_NOT_FOUND", f"unknown series {series!r}", 404)
        return key

    def _window(self, key: SeriesKey, origin: date):
        sample = make_window(self.panel, key, self.model.config, origin)
        if sample is None:
            raise ServiceError(
                "ORIGIN_NOT_FOUND",
                f"origin {origin.isoformat()} lacks history or horizon coverage",
                404,
            )
        return sample

    def _compose(self, sample, with_actuals: bool = True) -> ComposedForecast:
        batch = batch_from_samples([sample])
        result = self.model.forward(batch, training=False)
        actuals = None
        if with_actuals and np.all(sample.target_mask > 0):
            actuals = [sample.target]
        return compose_forecasts(batch, result, self._causal_names, actuals=actuals)[0]

    # -- endpoints -----------------------------------------------------------

    def meta(self) -> dict:
        config = self.model.config
        return {
            "v": 1,
            "snapshot": self.snapshot_hash,
            "hierarchy": list(config.hierarchy),
            "horizon": config.horizon,
            "history_length": config.history_length,
            "embedding_size": config.embedding_size,
            "covariates": [c.to_dict() for c in config.covariates],
        }

    def series(self) -> dict:
        out = []
        for key in self.keys:
            table = self.panel.tables[key]
            first = table.dates[0].toordinal() + self.model.config.history_length
            last = table.dates[-1].toordinal() - self.model.config.horizon + 1
            out.append(
                {
                    "series": str(key),
                    "first_origin": date.fromordinal(first).isoformat(),
                    "last_origin": date.fromordinal(last).isoformat(),
                }
            )
        return {"v": 1, "series": out}

    def _raw_causal(self, sample) -> dict[str, list[float]]:
        t_h = self.model.config.history_length
        return {
            name: sample.bundle.C[i, t_h:].tolist()
            for i, name in enumerate(self._causal_names)
        }

    def forecast(self, series: str, origin: str) -> dict:
        key = self._resolve_series(series)
        try:
            origin_day = date.fromisoformat(origin)
        except ValueError as exc:
            raise ServiceError("BAD_REQUEST", f"bad origin date: {exc}", 400) from exc
        sample = self._window(key, origin_day)
        fc = self._compose(sample)
        body = fc.to_dict()
        body["series"] = str(key)
        body["origin"] = origin_day.isoformat()
        body["id"] = self.forecast_id(key, origin_day)
        body["raw_causal"] = self._raw_causal(sample)
        return body

    def whatif(self, payload: dict) -> dict:
        try:
            scenario = Scenario.from_dict(payload)
        except DataError as exc:
            raise ServiceError("INVALID_SCENARIO", str(exc), 400) from exc
        key = self._resolve_series(scenario.series)
        sample = self._window(key, scenario.origin)

        config = self.model.config
        bundle = sample.bundle
        for o in scenario.overrides:
            if o.covariate not in self._causal_names:
                raise ServiceError(
                    "INVALID_SCENARIO",
                    f"override targets non-causal covariate {o.covariate!r}",
                    400,
                )
            if not 0 <= o.step < config.horizon:
                raise ServiceError(
                    "INVALID_SCENARIO",
                    f"override step {o.step} outside [0, {config.horizon})",
                    400,
                )
            row = self._causal_names.index(o.covariate)
            spec = config.causal[row]
            if spec.is_categorical and not (
                float(o.value).is_integer() and 0 <= int(o.value) < spec.cardinality
            ):
                raise ServiceError(
                    "INVALID_SCENARIO",
                    f"{o.covariate!r} expects a category code in "
                    f"[0, {spec.cardinality}), got {o.value}",
                    400,
                )
            # overrides are raw values applied before the value transform
            bundle.C[row, config.history_length + o.step] = o.value

        fc = self._compose(sample, with_actuals=False)
        body = fc.to_dict()
        body["series"] = str(key)
        body["origin"] = scenario.origin.isoformat()
        body["id"] = self.forecast_id(key, scenario.origin)
        body["scenario"] = scenario.to_dict()
        body["raw_causal"] = self._raw_causal(sample)
        return body

    def adjust(self, payload: dict) -> dict:
        forecast_id = payload.get("forecast_id")
        series = payload.get("series")
        origin = payload.get("origin")
        if not (forecast_id and series and origin):
            raise ServiceError(
                "INVALID_ADJUSTMENT", "need forecast_id, series, and origin", 400
            )
        key = self._resolve_series(series)
        try:
            origin_day = date.fromisoformat(origin)
        except ValueError as exc:
            raise ServiceError("BAD_REQUEST", f"bad origin date: {exc}", 400) from exc
        if self.forecast_id(key, origin_day) != forecast_id:
            raise ServiceError(
                "INVALID_ADJUSTMENT",
                "forecast_id does not match (series, origin) under this snapshot",
                400,
            )
        try:
            adjustment = Adjustment.from_dict(payload.get("adjustment", {}))
        except DataError as exc:
            raise ServiceError("INVALID_ADJUSTMENT", str(exc), 400) from exc

        sample = self._window(key, origin_day)
        base = self._compose(sample)
        try:
            recompose(base, adjustment)  # validate before persisting
        except DataError as exc:
            raise ServiceError("INVALID_ADJUSTMENT", str(exc), 400) from exc
        with self._write_lock:
            self.log.append(forecast_id, adjustment)
            final = self.log.replay(forecast_id, base)
        body = final.to_dict()
        body["series"] = str(key)
        body["origin"] = origin_day.isoformat()
        body["id"] = forecast_id
        body["n_adjustments"] = len(self.log.entries(forecast_id))
        return body

    def adjustments(self, forecast_id: str) -> dict:
        return {"v": 1, "forecast_id": forecast_id, "entries": self.log.entries(forecast_id)}
