"""CLI and HTTP service exposing composed forecasts, what-if scenarios,
and judgmental adjustments."""

from .core import ForecastService, ServiceError
from .scenario import Adjustment, AdjustmentLog, Override, Scenario, recompose
from .server import ForecastHttpServer

__all__ = [
    "ForecastService",
    "ServiceError",
    "Adjustment",
    "AdjustmentLog",
    "Override",
    "Scenario",
    "recompose",
    "ForecastHttpServer",
]
