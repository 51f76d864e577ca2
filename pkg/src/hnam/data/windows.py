"""Window sampling: engineered series into model-ready covariate bundles."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from ..errors import DataError
from ..model import Batch, ContinuousStats, CovariateBundle, CovariateSpec, HnamConfig
from ..tensor.snapshot import load_snapshot, save_snapshot
from .features import FeatureTable, engineer_features, relative_time_index
from .ingest import Dataset, SeriesKey

logger = logging.getLogger(__name__)


@dataclass
class WindowSample:
    series: SeriesKey
    origin: date
    bundle: CovariateBundle
    target: np.ndarray  # [T_f], raw sales
    target_mask: np.ndarray  # [T_f], 1 where the target day is usable


@dataclass
class Panel:
    """Engineered feature tables plus static vocabularies for a dataset."""

    tables: dict[SeriesKey, FeatureTable]
    product_codes: dict[str, int]
    store_codes: dict[str, int]
    dataset_start: date

    @classmethod
    def build(cls, dataset: Dataset, keys: list[SeriesKey]) -> "Panel":
        start = dataset.start_date()
        tables = {
            key: engineer_features(dataset.series[key], start, dataset.has_price)
            for key in keys
        }
        return cls(
            tables=tables,
            product_codes={
                p: i for i, p in enumerate(sorted({k.product_id for k in keys}))
            },
            store_codes={
                s: i for i, s in enumerate(sorted({k.store_id for k in keys}))
            },
            dataset_start=start,
        )


def build_covariate_specs(dataset: Dataset, panel: Panel) -> tuple[list[CovariateSpec], list[str]]:
    """Covariate layout and causal hierarchy for what the dataset offers.

    Hierarchy order: weekday, relative price, promotion (or snap when the
    dataset has snap days instead of scheduled promotions), holiday.
    """
    specs = [
        CovariateSpec("product", "static", cardinality=max(2, len(panel.product_codes))),
        CovariateSpec("store", "static", cardinality=max(2, len(panel.store_codes))),
        CovariateSpec("doy_sin", "non_causal"),
        CovariateSpec("doy_cos", "non_causal"),
        CovariateSpec("abs_index", "non_causal"),
        CovariateSpec("rel_index", "non_causal"),
        CovariateSpec("sales", "past"),
        CovariateSpec("missing", "past", cardinality=2),
    ]
    hierarchy = ["weekday"]
    specs.append(CovariateSpec("weekday", "causal", cardinality=7))
    if dataset.has_price:
        specs.append(CovariateSpec("price_missing", "past", cardinality=2))
        specs.append(CovariateSpec("relative_price", "causal"))
        hierarchy.append("relative_price")
    if dataset.has_promotion:
        specs.append(
            CovariateSpec(
                "promotion", "causal", cardinality=max(2, len(dataset.promotion_labels))
            )
        )
        hierarchy.append("promotion")
    elif dataset.has_snap:
        specs.append(CovariateSpec("snap", "causal", cardinality=2))
        hierarchy.append("snap")
    if dataset.has_holiday:
        specs.append(
            CovariateSpec(
                "holiday", "causal", cardinality=max(2, len(dataset.holiday_labels))
            )
        )
        hierarchy.append("holiday")
    return specs, hierarchy


def _series_row(
    name: str,
    spec: CovariateSpec,
    table: FeatureTable,
    key: SeriesKey,
    panel: Panel,
    lo: int,
    hi: int,
    t_h: int,
    t_f: int,
) -> np.ndarray:
    if name == "product":
        return np.full(hi - lo, panel.product_codes[key.product_id], dtype=np.float64)
    if name == "store":
        return np.full(hi - lo, panel.store_codes[key.store_id], dtype=np.float64)
    if name == "rel_index":
        return relative_time_index(t_h, t_f)
    if name not in table.columns:
        raise DataError(f"feature column {name!r} missing for series {key}")
    return table.columns[name][lo:hi].astype(np.float64)


def make_window(
    panel: Panel,
    key: SeriesKey,
    config: HnamConfig,
    origin: date,
    target_limit: date | None = None,
) -> WindowSample | None:
    """One sample at `origin`, or None when history/future coverage is short."""
    table = panel.tables[key]
    t_h, t_f = config.history_length, config.horizon
    try:
        o = table.day_index(origin)
    except IndexError:
        return None
    lo, hi = o - t_h, o + t_f
    if lo < 0 or hi > len(table):
        return None

    groups: dict[str, list[np.ndarray]] = {
        "static": [], "non_causal": [], "past": [], "causal": []
    }
    raw_sales = table.columns["sales"][lo:hi].copy()
    y_scale = 1.0 + float(raw_sales[:t_h].mean())

    for kind in ("static", "non_causal", "past"):
        for spec in config.by_kind(kind):
            row = _series_row(spec.name, spec, table, key, panel, lo, hi, t_h, t_f)
            row = row.copy()
            if kind == "past":
                if spec.name == "sales":
                    row = row / y_scale
                row[t_h:] = 0.0
            groups[kind].append(row)
    for spec in config.causal:
        groups["causal"].append(
            _series_row(spec.name, spec, table, key, panel, lo, hi, t_h, t_f)
        )

    def stack_rows(rows: list[np.ndarray]) -> np.ndarray:
        return np.stack(rows) if rows else np.zeros((0, t_h + t_f))

    target = raw_sales[t_h:].copy()
    mask = np.ones(t_f)
    if target_limit is not None:
        for step in range(t_f):
            if origin + timedelta(days=step) >= target_limit:
                mask[step] = 0.0
                target[step] = 0.0

    bundle = CovariateBundle(
        S=stack_rows(groups["static"]),
        T=stack_rows(groups["non_causal"]),
        P=stack_rows(groups["past"]),
        C=stack_rows(groups["causal"]),
        T_h=t_h,
        T_f=t_f,
        y_scale=y_scale,
    )
    return WindowSample(
        series=key, origin=origin, bundle=bundle, target=target, target_mask=mask
    )


def make_windows(
    panel: Panel,
    config: HnamConfig,
    origins: list[date],
    keys: list[SeriesKey] | None = None,
    target_limit: date | None = None,
    origin_stride: int = 1,
) -> list[WindowSample]:
    """One sample per (series, valid origin); short series skip with a warning."""
    samples: list[WindowSample] = []
    for key in keys or sorted(panel.tables):
        emitted = 0
        for origin in origins[::origin_stride]:
            sample = make_window(panel, key, config, origin, target_limit)
            if sample is not None:
                samples.append(sample)
                emitted += 1
        if emitted == 0:
            logger.warning("series %s: no origin has enough history, skipped", key)
    return samples


def split_train_val(
    origins: list[date], test_month_start: date, val_days: int = 14
) -> tuple[list[date], list[date]]:
    """Validation origins are the `val_days` days right before the test month;
    training origins end `val_days` earlier."""
    val_start = test_month_start - timedelta(days=val_days)
    train = [o for o in origins if o < val_start]
    val = [o for o in origins if val_start <= o < test_month_start]
    if not train or not val:
        raise DataError(
            f"not enough origins before {test_month_start} for a train/val split"
        )
    return train, val


def fit_continuous_stats(samples: list[WindowSample], config: HnamConfig) -> ContinuousStats:
    """Mean/std per continuous covariate over the given (training) samples.

    Past rows contribute history columns only (their futures are zeroed by
    construction). Causal continuous covariates must vary.
    """
    if not samples:
        raise DataError("cannot fit statistics from zero samples")
    t_h = config.history_length
    values: dict[str, list[np.ndarray]] = {}

    def collect(kind: str, attr: str):
        specs = config.by_kind(kind)
        for row, spec in enumerate(specs):
            if spec.is_categorical:
                continue
            for s in samples:
                mat = getattr(s.bundle, attr)
                chunk = mat[row, :t_h] if kind == "past" else mat[row, :]
                values.setdefault(spec.name, []).append(chunk)

    collect("static", "S")
    collect("non_causal", "T")
    collect("past", "P")
    collect("causal", "C")
    flat = {name: np.concatenate(chunks) for name, chunks in values.items()}
    causal_cont = tuple(c.name for c in config.causal if not c.is_categorical)
    return ContinuousStats.fit(flat, require_variation=causal_cont)


# -- binary sample store ------------------------------------------------------


def save_samples(path: str | Path, samples: list[WindowSample]) -> None:
    """Cache samples keyed by (series, origin) in the snapshot container."""
    tensors: dict[str, np.ndarray] = {}
    index = []
    for i, s in enumerate(samples):
        for field_name in ("S", "T", "P", "C"):
            tensors[f"{i}.{field_name}"] = getattr(s.bundle, field_name)
        tensors[f"{i}.target"] = s.target
        tensors[f"{i}.mask"] = s.target_mask
        index.append(
            {
                "series": str(s.series),
                "origin": s.origin.isoformat(),
                "T_h": s.bundle.T_h,
                "T_f": s.bundle.T_f,
                "y_scale": s.bundle.y_scale,
            }
        )
    save_snapshot(path, tensors, root_seed=0, meta={"kind": "sample-store", "index": index})


def load_samples(path: str | Path) -> list[WindowSample]:
    tensors, manifest = load_snapshot(path)
    meta = manifest["meta"]
    if meta.get("kind") != "sample-store":
        raise DataError(f"{path}: not a sample store")
    samples = []
    for i, entry in enumerate(meta["index"]):
        bundle = CovariateBundle(
            S=tensors[f"{i}.S"],
            T=tensors[f"{i}.T"],
            P=tensors[f"{i}.P"],
            C=tensors[f"{i}.C"],
            T_h=entry["T_h"],
            T_f=entry["T_f"],
            y_scale=entry["y_scale"],
        )
        samples.append(
            WindowSample(
                series=SeriesKey.parse(entry["series"]),
                origin=date.fromisoformat(entry["origin"]),
                bundle=bundle,
                target=tensors[f"{i}.target"],
                target_mask=tensors[f"{i}.mask"],
            )
        )
    return samples


def batch_from_samples(samples: list[WindowSample]) -> Batch:
    return Batch.from_bundles(
        [s.bundle for s in samples],
        targets=[s.target for s in samples],
        masks=[s.target_mask for s in samples],
    )
