"""scikit-learn style estimator facade.

HnamForecaster wraps the full pipeline (selection, feature engineering,
window sampling, training) behind fit/predict/forecast with get_params and
set_params from BaseEstimator, so runs compose with standard tooling. The
two statistical baselines share the per-series fit/predict shape.
"""

from __future__ import annotations

from datetime import date, timedelta

import numpy as np
from sklearn.base import BaseEstimator

from .data import SelectionCriteria, batch_from_samples, make_window
from .data.ingest import Dataset, SeriesKey
from .errors import DataError
from .evaluation.baselines import (
    holt_winters_fit,
    holt_winters_forecast,
    holt_winters_update,
    seasonal_naive,
)
from .model import ComposedForecast, compose_forecasts
from .runner import all_origins, prepare, train_rolling_models
from .train import TrainConfig
from .validation import check_array_1d, check_date, check_fitted, check_horizon


class HnamForecaster(BaseEstimator):
    """Global interpretable demand forecaster over a panel dataset."""

    def __init__(
        self,
        embedding_size: int = 32,
        n_heads: int = 4,
        mlp_expansion: int = 4,
        conv_expansion: int = 2,
        dropout: float = 0.1,
        history_length: int = 35,
        horizon: int = 14,
        lr: float = 0.001,
        weight_decay: float = 0.01,
        batch_size: int = 256,
        max_epochs: int = 300,
        patience: int = 30,
        origin_stride: int = 1,
        seed: int = 0,
        selection: SelectionCriteria | None = None,
    ):
        self.embedding_size = embedding_size
        self.n_heads = n_heads
        self.mlp_expansion = mlp_expansion
        self.conv_expansion = conv_expansion
        self.dropout = dropout
        self.history_length = history_length
        self.horizon = horizon
        self.lr = lr
        self.weight_decay = weight_decay
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.origin_stride = origin_stride
        self.seed = seed
        self.selection = selection

        self.model_ = None
        self.prepared_ = None
        self.train_log_ = None

    def fit(self, dataset: Dataset, test_start=None) -> "HnamForecaster":
        """Train a global model on observations before `test_start`."""
        if not isinstance(dataset, Dataset):
            raise DataError("fit expects an ingested Dataset")
        if test_start is None:
            last = max(recs[-1].day for recs in dataset.series.values())
            test_start = last - timedelta(days=self.horizon - 1)
        test_start = check_date(test_start, "test_start")
        overrides = {
            "embedding_size": self.embedding_size,
            "n_heads": self.n_heads,
            "mlp_expansion": self.mlp_expansion,
            "conv_expansion": self.conv_expansion,
            "dropout": self.dropout,
            "history_length": self.history_length,
            "horizon": check_horizon(self.horizon),
        }
        self.prepared_ = prepare(
            dataset, test_start, self.selection, model_overrides=overrides
        )
        tc = TrainConfig(
            lr=self.lr,
            weight_decay=self.weight_decay,
            batch_size=self.batch_size,
            max_epochs_initial=self.max_epochs,
            patience=self.patience,
            seed=self.seed,
        )
        models, logs = train_rolling_models(
            self.prepared_, tc, [[test_start]], origin_stride=self.origin_stride
        )
        self.model_ = models[0]
        self.train_log_ = logs[0]
        return self

    def _sample(self, series, origin):
        check_fitted(self, ("model_", "prepared_"))
        key = series if isinstance(series, SeriesKey) else SeriesKey.parse(str(series))
        if key not in self.prepared_.panel.tables:
            raise DataError(f"unknown series {key}")
        sample = make_window(
            self.prepared_.panel, key, self.model_.config, check_date(origin, "origin")
        )
        if sample is None:
            raise DataError(f"origin {origin} lacks history or horizon coverage")
        return sample

    def forecast(self, series, origin) -> ComposedForecast:
        """Composed forecast (level, effects, prediction) for one origin."""
        sample = self._sample(series, origin)
        batch = batch_from_samples([sample])
        result = self.model_.forward(batch, training=False)
        names = [c.name for c in self.model_.config.causal]
        return compose_forecasts(batch, result, names)[0]

    def predict(self, series, origin) -> np.ndarray:
        """Truncated point forecast over the horizon."""
        return self.forecast(series, origin).truncated_prediction

    def origins(self) -> list[date]:
        check_fitted(self, ("prepared_",))
        return all_origins(self.prepared_.panel, self.prepared_.config)


class SeasonalNaiveForecaster(BaseEstimator):
    """Repeat the last observed seasonal cycle."""

    def __init__(self, season_length: int = 7):
        self.season_length = season_length
        self.history_ = None

    def fit(self, y) -> "SeasonalNaiveForecaster":
        self.history_ = check_array_1d(y, "history")
        return self

    def predict(self, horizon: int) -> np.ndarray:
        check_fitted(self, ("history_",))
        return seasonal_naive(
            self.history_, self.season_length, check_horizon(horizon)
        )


class HoltWintersForecaster(BaseEstimator):
    """Additive trend and seasonality with optimized smoothing weights."""

    def __init__(self, season_length: int = 7):
        self.season_length = season_length
        self.params_ = None

    def fit(self, y) -> "HoltWintersForecaster":
        self.params_ = holt_winters_fit(
            check_array_1d(y, "history"), self.season_length
        )
        return self

    def update(self, y) -> "HoltWintersForecaster":
        """Absorb newer observations without refitting the weights."""
        check_fitted(self, ("params_",))
        self.params_ = holt_winters_update(self.params_, check_array_1d(y, "history"))
        return self

    def predict(self, horizon: int) -> np.ndarray:
        check_fitted(self, ("params_",))
        return holt_winters_forecast(self.params_, check_horizon(horizon))
