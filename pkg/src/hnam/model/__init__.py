"""Model architecture: embeddings, level network, coefficient networks."""

from .bundle import Batch, CovariateBundle
from .compose import ComposedForecast, compose_forecasts, recompose_prediction
from .config import CovariateSpec, HnamConfig
from .network import ForwardResult, HnamModel, Streams
from .transform import ContinuousStats, transform_values

__all__ = [
    "Batch",
    "CovariateBundle",
    "ComposedForecast",
    "compose_forecasts",
    "recompose_prediction",
    "CovariateSpec",
    "HnamConfig",
    "ForwardResult",
    "HnamModel",
    "Streams",
    "ContinuousStats",
    "transform_values",
]
