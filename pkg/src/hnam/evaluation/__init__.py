"""Metrics, statistical baselines, and the rolling-forward harness."""

from .baselines import (
    EtsParams,
    holt_winters_fit,
    holt_winters_forecast,
    holt_winters_update,
    seasonal_naive,
)
from .metrics import smape, standardized_errors, truncate_predictions
from .rolling import (
    EvalModel,
    EvalReport,
    HnamEvalModel,
    HoltWintersModel,
    MetricRow,
    SeasonalNaiveModel,
    calendar_test_months,
    fixed_test_months,
    rolling_evaluate,
    write_report,
)

__all__ = [
    "EtsParams",
    "holt_winters_fit",
    "holt_winters_forecast",
    "holt_winters_update",
    "seasonal_naive",
    "smape",
    "standardized_errors",
    "truncate_predictions",
    "EvalModel",
    "EvalReport",
    "HnamEvalModel",
    "HoltWintersModel",
    "MetricRow",
    "SeasonalNaiveModel",
    "calendar_test_months",
    "fixed_test_months",
    "rolling_evaluate",
    "write_report",
]
