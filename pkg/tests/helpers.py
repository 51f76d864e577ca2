"""Shared fixtures: small random configs, bundles, batches, and the
hand-constructed selection dataset."""

from __future__ import annotations

from datetime import date, timedelta

import numpy as np

from hnam.data import DailyRecord, Dataset, SelectionCriteria, SeriesKey
from hnam.model import Batch, CovariateBundle, CovariateSpec, HnamConfig


def small_config(
    n_causal: int = 2,
    d: int = 8,
    n_heads: int = 2,
    T_h: int = 6,
    T_f: int = 3,
    dropout: float = 0.0,
    with_static: bool = True,
    with_past: bool = True,
) -> HnamConfig:
    covs = []
    if with_static:
        covs.append(CovariateSpec("item", "static", cardinality=4))
    covs.append(CovariateSpec("doy_sin", "non_causal"))
    if with_past:
        covs.append(CovariateSpec("sales", "past"))
    causal_templates = [
        ("weekday", 7),
        ("relative_price", None),
        ("promotion", 2),
        ("holiday", 3),
        ("extra", 4),
    ]
    hierarchy = []
    for name, card in causal_templates[:n_causal]:
        covs.append(CovariateSpec(name, "causal", cardinality=card))
        hierarchy.append(name)
    return HnamConfig(
        covariates=covs,
        hierarchy=hierarchy,
        embedding_size=d,
        n_heads=n_heads,
        mlp_expansion=2,
        conv_expansion=2,
        dropout=dropout,
        history_length=T_h,
        horizon=T_f,
    )


def random_bundle(
    config: HnamConfig, rng: np.random.Generator, y_scale: float | None = None
) -> CovariateBundle:
    total = config.total_steps
    statics = config.by_kind("static")
    temporals = config.by_kind("non_causal")
    pasts = config.by_kind("past")

    def draw(spec, n):
        if spec.is_categorical:
            return rng.integers(0, spec.cardinality, size=n).astype(np.float64)
        return rng.normal(size=n)

    S = np.zeros((len(statics), total))
    for r, spec in enumerate(statics):
        S[r, :] = draw(spec, 1)[0]
    T = np.stack([draw(s, total) for s in temporals]) if temporals else np.zeros((0, total))
    P = np.stack([draw(s, total) for s in pasts]) if pasts else np.zeros((0, total))
    if P.shape[0]:
        P[:, config.history_length :] = 0.0
    C = (
        np.stack([draw(s, total) for s in config.causal])
        if config.n_causal
        else np.zeros((0, total))
    )
    return CovariateBundle(
        S=S,
        T=T,
        P=P,
        C=C,
        T_h=config.history_length,
        T_f=config.horizon,
        y_scale=float(rng.uniform(1.0, 4.0)) if y_scale is None else y_scale,
    )


def random_batch(
    config: HnamConfig,
    rng: np.random.Generator,
    size: int = 2,
    with_targets: bool = False,
) -> Batch:
    bundles = [random_bundle(config, rng) for _ in range(size)]
    targets = (
        [rng.uniform(0, 10, size=config.horizon) for _ in range(size)]
        if with_targets
        else None
    )
    return Batch.from_bundles(bundles, targets=targets)


# -- hand-constructed selection fixture -----------------------------------
#
# Ten series over 400 days, test period starting at day 250. Four are clean;
# six violate exactly one filter each:
#   V1  99 non-zero sale days before the test period (needs >= 100)
#   V2  a 101-day run of zero sales after the first sale (limit 100)
#   V3  median sales exactly 5 in the assessment window (needs > 5)
#   V4  lowest total sales (top-9 cut drops exactly it)
#   V5  lowest total revenue (top-9 cut drops exactly it)
#   V6  5/400 = 1.25% missing days (limit < 1%)

FIXTURE_START = date(2023, 1, 1)
FIXTURE_DAYS = 400
FIXTURE_TEST_START = FIXTURE_START + timedelta(days=250)
FIXTURE_CLEAN = [
    SeriesKey("P0", "S1"),
    SeriesKey("P1", "S1"),
    SeriesKey("P2", "S1"),
    SeriesKey("P3", "S1"),
]

FIXTURE_CRITERIA = SelectionCriteria(
    min_presale_days=100,
    max_zero_gap=100,
    min_median_sales=5.0,
    top_n_sales=9,
    top_n_revenue=9,
    max_missing_frac=0.01,
)


def _fixture_series(sales_fn, price: float, missing_days=()):
    records = []
    for t in range(FIXTURE_DAYS):
        day = FIXTURE_START + timedelta(days=t)
        if t in missing_days:
            records.append(
                DailyRecord(day=day, sales=0.0, price=price, promotion=0,
                            holiday=0, snap=0, missing=True)
            )
        else:
            records.append(
                DailyRecord(day=day, sales=float(sales_fn(t)), price=price,
                            promotion=0, holiday=0, snap=0, missing=False)
            )
    return records


def build_selection_fixture() -> Dataset:
    series = {
        SeriesKey("P0", "S1"): _fixture_series(lambda t: 10, 5.0),
        SeriesKey("P1", "S1"): _fixture_series(lambda t: 12, 4.0),
        SeriesKey("P2", "S1"): _fixture_series(lambda t: 9, 6.0),
        SeriesKey("P3", "S1"): _fixture_series(lambda t: 11, 5.0),
        # V1: sales start at day 151 -> exactly 99 pre-test sale days
        SeriesKey("V1", "S1"): _fixture_series(lambda t: 10 if t >= 151 else 0, 5.0),
        # V2: zero sales on days 10..110 inclusive -> gap of 101
        SeriesKey("V2", "S1"): _fixture_series(
            lambda t: 0 if 10 <= t <= 110 else 10, 5.0
        ),
        # V3: constant 5 -> median exactly 5
        SeriesKey("V3", "S1"): _fixture_series(lambda t: 5, 5.0),
        # V4: 6,6,0 pattern -> median 6 but lowest total sales
        SeriesKey("V4", "S1"): _fixture_series(lambda t: 0 if t % 3 == 2 else 6, 5.0),
        # V5: decent sales, tiny price -> lowest revenue
        SeriesKey("V5", "S1"): _fixture_series(lambda t: 8, 0.4),
        # V6: five missing days
        SeriesKey("V6", "S1"): _fixture_series(
            lambda t: 10, 5.0, missing_days=set(range(160, 165))
        ),
    }
    return Dataset(series=series, has_price=True)
