"""Rolling-forward evaluation across sequential test months."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from ..data.ingest import SeriesKey
from ..data.windows import Panel, batch_from_samples, make_window
from ..errors import DataError
from ..model import HnamConfig, HnamModel, compose_forecasts
from .baselines import (
    EtsParams,
    holt_winters_fit,
    holt_winters_forecast,
    holt_winters_update,
    seasonal_naive,
)
from .metrics import smape, standardized_errors, truncate_predictions

logger = logging.getLogger(__name__)


@dataclass
class MetricRow:
    series: SeriesKey
    model: str
    smape: float
    std_mae: float
    std_rmse: float
    n_forecasts: int


@dataclass
class EvalReport:
    rows: list[MetricRow]
    aggregates: dict[str, dict[str, dict[str, float]]]  # model -> metric -> mean/median
    rank_freq: dict[str, dict[str, float]]  # model -> {"first": %, "second": %}
    n_series: int
    n_ties: int
    decompositions: list[dict] = field(default_factory=list)

    def aggregate(self, model: str, metric: str, stat: str) -> float:
        return self.aggregates[model][metric][stat]


def fixed_test_months(
    last_day: date, n_months: int = 5, month_len: int = 30, horizon: int = 14
) -> list[list[date]]:
    """Consecutive blocks of `month_len` origins, the last one ending so its
    final horizon still fits before `last_day` (inclusive). Oldest first."""
    last_origin = last_day - timedelta(days=horizon - 1)
    months = []
    for k in range(n_months, 0, -1):
        end = last_origin - timedelta(days=(n_months - k) * month_len)
        start = end - timedelta(days=month_len - 1)
        months.append([start + timedelta(days=i) for i in range(month_len)])
    months.reverse()
    return months


def calendar_test_months(last_day: date, n_months: int = 5, horizon: int = 14) -> list[list[date]]:
    """The last `n_months` fully available calendar months; origins whose full
    horizon no longer fits in the data are dropped."""
    last_origin = last_day - timedelta(days=horizon - 1)
    first_of_current = last_day.replace(day=1)
    months: list[list[date]] = []
    cursor = first_of_current
    # a month is fully available if its last day is on or before last_day
    next_month = (cursor + timedelta(days=32)).replace(day=1)
    if next_month - timedelta(days=1) > last_day:
        cursor = cursor - timedelta(days=1)
        cursor = cursor.replace(day=1)
    while len(months) < n_months:
        nxt = (cursor + timedelta(days=32)).replace(day=1)
        days = [
            cursor + timedelta(days=i)
            for i in range((nxt - cursor).days)
        ]
        months.append([d for d in days if d <= last_origin])
        cursor = (cursor - timedelta(days=1)).replace(day=1)
    months.reverse()
    return months


class EvalModel:
    """Adapter protocol for the harness."""

    name: str = "model"

    def start_month(self, month_index: int, origins: list[date]) -> None:
        """Called before each test month, oldest first."""

    def forecast_block(self, key: SeriesKey, origins: list[date]) -> np.ndarray:
        """Untruncated forecasts, shape [len(origins), horizon]."""
        raise NotImplementedError


class SeasonalNaiveModel(EvalModel):
    def __init__(self, panel: Panel, horizon: int, season: int = 7):
        self.name = "seasonal_naive"
        self.panel = panel
        self.horizon = horizon
        self.season = season

    def forecast_block(self, key: SeriesKey, origins: list[date]) -> np.ndarray:
        table = self.panel.tables[key]
        sales = table.columns["sales"]
        out = np.empty((len(origins), self.horizon))
        for i, origin in enumerate(origins):
            o = table.day_index(origin)
            out[i] = seasonal_naive(sales[:o], self.season, self.horizon)
        return out


class HoltWintersModel(EvalModel):
    """Smoothing weights fitted once per (series, test month); states are
    recomputed from all data up to each forecast origin."""

    def __init__(self, panel: Panel, horizon: int, season: int = 7):
        self.name = "holt_winters"
        self.panel = panel
        self.horizon = horizon
        self.season = season
        self._params: dict[SeriesKey, EtsParams] = {}
        self._month_start: date | None = None

    def start_month(self, month_index: int, origins: list[date]) -> None:
        self._month_start = origins[0]
        self._params.clear()

    def forecast_block(self, key: SeriesKey, origins: list[date]) -> np.ndarray:
        table = self.panel.tables[key]
        sales = table.columns["sales"]
        if key not in self._params:
            fit_end = table.day_index(self._month_start)
            self._params[key] = holt_winters_fit(sales[:fit_end], self.season)
        params = self._params[key]
        out = np.empty((len(origins), self.horizon))
        for i, origin in enumerate(origins):
            o = table.day_index(origin)
            state = holt_winters_update(params, sales[:o])
            out[i] = holt_winters_forecast(state, self.horizon)
        return out


class HnamEvalModel(EvalModel):
    """Serves per-month snapshots; batches all origins of a series at once."""

    def __init__(
        self,
        panel: Panel,
        config: HnamConfig,
        snapshots: list[HnamModel],
        collect_decompositions: bool = False,
    ):
        self.name = "hnam"
        self.panel = panel
        self.config = config
        self.snapshots = snapshots
        self.collect_decompositions = collect_decompositions
        self.decompositions: list[dict] = []
        self._model: HnamModel | None = None

    def start_month(self, month_index: int, origins: list[date]) -> None:
        self._model = self.snapshots[month_index]

    def forecast_block(self, key: SeriesKey, origins: list[date]) -> np.ndarray:
        samples = []
        for origin in origins:
            sample = make_window(self.panel, key, self.config, origin)
            if sample is None:
                raise DataError(f"no window for {key} at {origin}")
            samples.append(sample)
        batch = batch_from_samples(samples)
        result = self._model.forward(batch, training=False)
        forecasts = compose_forecasts(
            batch, result, [c.name for c in self.config.causal],
            actuals=[s.target for s in samples],
        )
        if self.collect_decompositions:
            for s, fc in zip(samples, forecasts):
                record = fc.to_dict()
                record["series"] = str(key)
                record["origin"] = s.origin.isoformat()
                self.decompositions.append(record)
        return np.stack([fc.prediction for fc in forecasts])


def rolling_evaluate(
    models: list[EvalModel],
    panel: Panel,
    keys: list[SeriesKey],
    test_months: list[list[date]],
    horizon: int = 14,
) -> EvalReport:
    """Every model forecasts every (series, origin, step) cell; negative
    predictions are truncated; metrics pool each series' cells."""
    actual_cells: dict[SeriesKey, list[np.ndarray]] = {k: [] for k in keys}
    predicted: dict[tuple[str, SeriesKey], list[np.ndarray]] = {
        (m.name, k): [] for m in models for k in keys
    }
    target_days: dict[SeriesKey, set[date]] = {k: set() for k in keys}

    for month_index, origins in enumerate(test_months):
        for model in models:
            model.start_month(month_index, origins)
        for key in keys:
            table = panel.tables[key]
            sales = table.columns["sales"]
            actual_block = np.empty((len(origins), horizon))
            for i, origin in enumerate(origins):
                o = table.day_index(origin)
                if o + horizon > len(table):
                    raise DataError(
                        f"series {key}: origin {origin} lacks {horizon} target days"
                    )
                actual_block[i] = sales[o : o + horizon]
                target_days[key].update(
                    origin + timedelta(days=h) for h in range(horizon)
                )
            actual_cells[key].append(actual_block)
            for model in models:
                block = model.forecast_block(key, list(origins))
                if block.shape != (len(origins), horizon) or not np.all(
                    np.isfinite(block)
                ):
                    raise DataError(
                        f"model {model.name} returned an invalid block for {key}"
                    )
                predicted[(model.name, key)].append(truncate_predictions(block))

    rows: list[MetricRow] = []
    skipped: set[SeriesKey] = set()
    for key in keys:
        actual = np.concatenate([b.ravel() for b in actual_cells[key]])
        table = panel.tables[key]
        day_values = np.array(
            [table.columns["sales"][table.day_index(d)] for d in sorted(target_days[key])]
        )
        std = float(day_values.std())
        if std == 0.0:
            logger.warning("series %s: zero target std, excluded from report", key)
            skipped.add(key)
            continue
        for model in models:
            pred = np.concatenate([b.ravel() for b in predicted[(model.name, key)]])
            std_mae, std_rmse = standardized_errors(actual, pred, std)
            rows.append(
                MetricRow(
                    series=key,
                    model=model.name,
                    smape=smape(actual, pred),
                    std_mae=std_mae,
                    std_rmse=std_rmse,
                    n_forecasts=int(actual.size),
                )
            )

    scored_keys = [k for k in keys if k not in skipped]
    model_names = [m.name for m in models]
    by_model: dict[str, list[MetricRow]] = {name: [] for name in model_names}
    for row in rows:
        by_model[row.model].append(row)

    aggregates = {
        name: {
            metric: {
                "mean": float(np.mean([getattr(r, metric) for r in by_model[name]])),
                "median": float(np.median([getattr(r, metric) for r in by_model[name]])),
            }
            for metric in ("smape", "std_mae", "std_rmse")
        }
        for name in model_names
    }

    # rank frequencies by per-series RMSE; ties broken by model name order
    firsts = {name: 0 for name in model_names}
    seconds = {name: 0 for name in model_names}
    n_ties = 0
    rmse_by: dict[tuple[str, SeriesKey], float] = {
        (r.model, r.series): r.std_rmse for r in rows
    }
    for key in scored_keys:
        scores = sorted(
            model_names, key=lambda name: (rmse_by[(name, key)], name)
        )
        values = [rmse_by[(name, key)] for name in model_names]
        if len(set(values)) < len(values):
            n_ties += 1
        firsts[scores[0]] += 1
        if len(scores) > 1:
            seconds[scores[1]] += 1
    n = max(1, len(scored_keys))
    rank_freq = {
        name: {
            "first": 100.0 * firsts[name] / n,
            "second": 100.0 * seconds[name] / n,
        }
        for name in model_names
    }

    decompositions: list[dict] = []
    for model in models:
        if isinstance(model, HnamEvalModel) and model.collect_decompositions:
            decompositions.extend(model.decompositions)

    return EvalReport(
        rows=rows,
        aggregates=aggregates,
        rank_freq=rank_freq,
        n_series=len(scored_keys),
        n_ties=n_ties,
        decompositions=decompositions,
    )


# -- report emission -----------------------------------------------------------


def write_report(report: EvalReport, out_dir: str | Path) -> None:
    """metrics.csv (per-series), summary.txt (aggregate table mirror),
    decompositions.jsonl (per-forecast records)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "metrics.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["product_id", "store_id", "model", "smape", "std_mae", "std_rmse", "n_forecasts"]
        )
        for r in report.rows:
            writer.writerow(
                [
                    r.series.product_id,
                    r.series.store_id,
                    r.model,
                    f"{r.smape:.6f}",
                    f"{r.std_mae:.6f}",
                    f"{r.std_rmse:.6f}",
                    r.n_forecasts,
                ]
            )

    lines = [
        f"{'model':<16} {'SMAPE mean':>11} {'SMAPE med':>10} "
        f"{'sMAE mean':>10} {'sMAE med':>9} {'sRMSE mean':>11} {'sRMSE med':>10} "
        f"{'1st':>7} {'2nd':>7}"
    ]
    for name, agg in report.aggregates.items():
        rf = report.rank_freq[name]
        lines.append(
            f"{name:<16} "
            f"{agg['smape']['mean']:>11.3f} {agg['smape']['median']:>10.3f} "
            f"{agg['std_mae']['mean']:>10.3f} {agg['std_mae']['median']:>9.3f} "
            f"{agg['std_rmse']['mean']:>11.3f} {agg['std_rmse']['median']:>10.3f} "
            f"{rf['first']:>6.1f}% {rf['second']:>6.1f}%"
        )
    lines.append(f"series: {report.n_series}; rank ties: {report.n_ties}")
    (out / "summary.txt").write_text("\n".join(lines) + "\n")

    with open(out / "decompositions.jsonl", "w") as fh:
        for record in report.decompositions:
            fh.write(json.dumps(record) + "\n")
