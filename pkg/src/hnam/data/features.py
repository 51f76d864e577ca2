"""Per-day engineered features for one series."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from .ingest import DailyRecord

DOY_PERIOD = 365.25  # absorbs leap years
PRICE_WINDOW = 20  # trailing, inclusive of the current day


@dataclass
class FeatureTable:
    """Aligned per-day feature arrays for one series."""

    dates: list[date]
    columns: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.dates)

    def day_index(self, day: date) -> int:
        offset = (day - self.dates[0]).days
        if offset < 0 or offset >= len(self.dates):
            raise IndexError(f"{day} outside series range")
        return offset


def rolling_mean_inclusive(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing mean over [t-window+1, t]; shorter prefixes use what exists."""
    csum = np.concatenate([[0.0], np.cumsum(values)])
    out = np.empty_like(values, dtype=np.float64)
    for t in range(len(values)):
        lo = max(0, t - window + 1)
        out[t] = (csum[t + 1] - csum[lo]) / (t + 1 - lo)
    return out


def relative_time_index(t_h: int, t_f: int) -> np.ndarray:
    """Window-positional covariate: (position - T_h) / (T_h + T_f)."""
    return (np.arange(t_h + t_f, dtype=np.float64) - t_h) / (t_h + t_f)


def engineer_features(
    records: list[DailyRecord], dataset_start: date, has_price: bool
) -> FeatureTable:
    """Per-day covariate columns: calendar features, relative price, flags.

    relative_price is the percentage deviation of the day's price from the
    trailing 20-day mean; entirely missing price information yields zeros
    plus a raised flag column.
    """
    n = len(records)
    dates = [r.day for r in records]
    sales = np.array([r.sales for r in records], dtype=np.float64)
    weekday = np.array([r.weekday for r in records], dtype=np.float64)
    promotion = np.array([r.promotion for r in records], dtype=np.float64)
    holiday = np.array([r.holiday for r in records], dtype=np.float64)
    snap = np.array([r.snap for r in records], dtype=np.float64)
    missing = np.array([1.0 if r.missing else 0.0 for r in records])

    doy = np.array(
        [(r.day - date(r.day.year, 1, 1)).days for r in records], dtype=np.float64
    )
    angle = 2.0 * np.pi * doy / DOY_PERIOD
    abs_index = np.array(
        [(r.day - dataset_start).days for r in records], dtype=np.float64
    )

    columns = {
        "sales": sales,
        "weekday": weekday,
        "promotion": promotion,
        "holiday": holiday,
        "snap": snap,
        "missing": missing,
        "doy_sin": np.sin(angle),
        "doy_cos": np.cos(angle),
        "abs_index": abs_index,
    }

    if has_price:
        prices = np.array(
            [r.price if r.price is not None else np.nan for r in records],
            dtype=np.float64,
        )
        if np.all(np.isnan(prices)):
            columns["relative_price"] = np.zeros(n)
            columns["price_missing"] = np.ones(n)
        else:
            filled = prices.copy()
            # forward/backward fill so the rolling window is defined everywhere
            last = np.nan
            for i in range(n):
                if np.isnan(filled[i]):
                    filled[i] = last
                else:
                    last = filled[i]
            first_valid = filled[~np.isnan(filled)][0]
            filled[np.isnan(filled)] = first_valid
            base = rolling_mean_inclusive(filled, PRICE_WINDOW)
            columns["relative_price"] = (filled - base) / base
            columns["price_missing"] = np.isnan(prices).astype(np.float64)
            columns["price"] = filled

    return FeatureTable(dates=dates, columns=columns)
