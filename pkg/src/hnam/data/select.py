"""Series selection filters applied before training and evaluation."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date

import numpy as np

from .ingest import Dataset, SeriesKey

logger = logging.getLogger(__name__)


@dataclass
class SelectionCriteria:
    min_presale_days: int = 100
    max_zero_gap: int = 100
    min_median_sales: float = 5.0
    top_n_sales: int = 500
    top_n_revenue: int = 500
    max_missing_frac: float = 0.01


def _longest_zero_run_after_first_sale(sales: np.ndarray) -> int:
    nonzero = np.nonzero(sales > 0)[0]
    if nonzero.size == 0:
        return len(sales)
    run = best = 0
    for v in sales[nonzero[0] :]:
        if v == 0:
            run += 1
            best = max(best, run)
        else:
            run = 0
    return best


def select_series(
    dataset: Dataset,
    criteria: SelectionCriteria,
    test_start: date,
    test_end: date | None = None,
) -> list[SeriesKey]:
    """Keys passing every applicable filter, in deterministic sorted order.

    The assessment window for median/sales/revenue is the test periods plus
    the 100 days before test_start. The revenue filter is skipped when the
    dataset has no price information.
    """
    if test_end is None:
        test_end = dataset.end_date()
    window_start_ord = test_start.toordinal() - 100

    survivors: list[SeriesKey] = []
    totals_sales: dict[SeriesKey, float] = {}
    totals_revenue: dict[SeriesKey, float] = {}

    # rank totals over the whole population: each criterion is independent
    for key in dataset.keys:
        records = dataset.series[key]
        days = np.array([r.day.toordinal() for r in records])
        sales = np.array([r.sales for r in records])
        in_window = (days >= window_start_ord) & (days <= test_end.toordinal())
        totals_sales[key] = float(sales[in_window].sum())
        if dataset.has_price:
            prices = np.array(
                [r.price if r.price is not None else 0.0 for r in records]
            )
            totals_revenue[key] = float((sales * prices)[in_window].sum())

    for key in dataset.keys:
        records = dataset.series[key]
        days = np.array([r.day.toordinal() for r in records])
        sales = np.array([r.sales for r in records])
        missing = np.array([r.missing for r in records])

        pre_test = (days < test_start.toordinal()) & (sales > 0)
        if int(pre_test.sum()) < criteria.min_presale_days:
            continue
        if _longest_zero_run_after_first_sale(sales) > criteria.max_zero_gap:
            continue
        in_window = (days >= window_start_ord) & (days <= test_end.toordinal())
        if not in_window.any():
            continue
        if float(np.median(sales[in_window])) <= criteria.min_median_sales:
            continue
        if float(missing.mean()) >= criteria.max_missing_frac:
            continue
        survivors.append(key)

    def top(totals: dict[SeriesKey, float], n: int) -> set[SeriesKey]:
        ranked = sorted(totals, key=lambda k: (-totals[k], k))
        return set(ranked[:n])

    keep = top(totals_sales, criteria.top_n_sales)
    if dataset.has_price:
        keep &= top(totals_revenue, criteria.top_n_revenue)
    selected = sorted(k for k in survivors if k in keep)
    if not selected:
        logger.warning("series selection produced an empty set")
    return selected
