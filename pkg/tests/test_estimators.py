"""Estimator facade: sklearn conventions and end-to-end fit/predict."""

import numpy as np
import pytest

from test_service import service_fixture

from hnam.errors import DataError
from hnam.estimators import (
    HnamForecaster,
    HoltWintersForecaster,
    SeasonalNaiveForecaster,
)


class TestSklearnConventions:
    def test_get_set_params_roundtrip(self):
        est = HnamForecaster(embedding_size=8, horizon=7)
        params = est.get_params()
        assert params["embedding_size"] == 8
        est.set_params(horizon=10)
        assert est.horizon == 10

    def test_clone_compatible(self):
        from sklearn.base import clone

        est = HnamForecaster(embedding_size=16, seed=3)
        cloned = clone(est)
        assert cloned.embedding_size == 16
        assert cloned.model_ is None

    def test_unfitted_predict_raises(self):
        with pytest.raises(DataError, match="not fitted"):
            HnamForecaster().predict("A/S", "2024-01-01")
        with pytest.raises(DataError, match="not fitted"):
            SeasonalNaiveForecaster().predict(7)


class TestBaselineEstimators:
    def test_seasonal_naive_fit_predict(self):
        pattern = np.array([3.0, 5, 7, 9, 4, 2, 6])
        est = SeasonalNaiveForecaster().fit(np.tile(pattern, 4))
        assert np.array_equal(est.predict(7), pattern)

    def test_holt_winters_fit_predict_update(self):
        season = np.array([4.0, -2, 1, 0, -1, 3, -5])
        y = 10.0 + season[np.arange(140) % 7]
        est = HoltWintersForecaster().fit(y[:100])
        est.update(y[:130])
        fc = est.predict(7)
        assert np.max(np.abs(fc - y[130:137])) < 1e-3

    def test_bad_input_validation(self):
        with pytest.raises(DataError):
            SeasonalNaiveForecaster().fit(np.array([[1.0, 2.0]]))
        with pytest.raises(DataError):
            SeasonalNaiveForecaster().fit(np.array([1.0, np.nan]))


@pytest.fixture(scope="module")
def fitted():
    dataset, _, _, _ = service_fixture(n_days=150, seed=2)
    est = HnamForecaster(
        embedding_size=8, n_heads=2, mlp_expansion=2, conv_expansion=1,
        dropout=0.0, history_length=14, horizon=7,
        lr=0.005, batch_size=64, max_epochs=4, patience=30,
        origin_stride=2, seed=0,
        selection=None,
    )
    # relax selection for the tiny fixture
    from hnam.data import SelectionCriteria

    est.set_params(
        selection=SelectionCriteria(min_presale_days=30, min_median_sales=1.0)
    )
    return est.fit(dataset, test_start="2024-04-20")


class TestHnamForecaster:

    def test_fit_returns_self_and_logs(self, fitted):
        assert fitted.model_ is not None
        assert fitted.train_log_.epochs

    def test_predict_shape_and_truncation(self, fitted):
        pred = fitted.predict("P0/S0", "2024-03-01")
        assert pred.shape == (7,)
        assert np.all(pred >= 0)

    def test_forecast_decomposition_sums(self, fitted):
        fc = fitted.forecast("P1/S0", "2024-03-01")
        resum = fc.level + fc.effects.sum(axis=0)
        assert np.allclose(resum, fc.prediction, rtol=1e-9)

    def test_unknown_series(self, fitted):
        with pytest.raises(DataError, match="unknown series"):
            fitted.predict("Q9/S0", "2024-03-01")
