"""Data pipeline: ingestion, selection, features, window sampling."""

from .features import FeatureTable, engineer_features, relative_time_index, rolling_mean_inclusive
from .ingest import DailyRecord, Dataset, SchemaConfig, SeriesKey, ingest_csv
from .select import SelectionCriteria, select_series
from .windows import (
    Panel,
    WindowSample,
    batch_from_samples,
    build_covariate_specs,
    fit_continuous_stats,
    load_samples,
    make_window,
    make_windows,
    save_samples,
    split_train_val,
)

__all__ = [
    "DailyRecord",
    "Dataset",
    "SchemaConfig",
    "SeriesKey",
    "ingest_csv",
    "SelectionCriteria",
    "select_series",
    "FeatureTable",
    "engineer_features",
    "relative_time_index",
    "rolling_mean_inclusive",
    "Panel",
    "WindowSample",
    "batch_from_samples",
    "build_covariate_specs",
    "fit_continuous_stats",
    "load_samples",
    "make_window",
    "make_windows",
    "save_samples",
    "split_train_val",
]
