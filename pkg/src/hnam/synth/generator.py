"""Parametric demand generator with a known additive decomposition.

Each series has a base level, a weekday profile (reference weekday zero by
construction), a price response proportional to the 20-day relative price,
a promotion bump whose size depends on the weekday, and a holiday bump
whose size depends on whether a promotion runs the same day. The exact
per-day decomposition is emitted alongside the sales, so a trained model's
claimed effects can be scored against truth.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from ..data.features import PRICE_WINDOW, rolling_mean_inclusive
from ..tensor.rng import stream

logger = logging.getLogger(__name__)

START_DAY = date(2020, 1, 6)  # a Monday: day index % 7 == calendar weekday


@dataclass
class SyntheticSpec:
    n_series: int = 20
    n_days: int = 900
    base_min: float = 10.0
    base_max: float = 100.0
    promo_prob: float = 0.1
    holiday_prob: float = 0.03
    price_elasticity_range: tuple[float, float] = (-2.5, -1.0)
    noise_scale: float = 0.1  # noise std = noise_scale * base
    weekday_scale: float = 1.0  # 0 flattens the weekday profile
    multiplicative: bool = False
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "n_series": self.n_series,
            "n_days": self.n_days,
            "base_min": self.base_min,
            "base_max": self.base_max,
            "promo_prob": self.promo_prob,
            "holiday_prob": self.holiday_prob,
            "price_elasticity_range": list(self.price_elasticity_range),
            "noise_scale": self.noise_scale,
            "weekday_scale": self.weekday_scale,
            "multiplicative": self.multiplicative,
            "seed": self.seed,
        }


@dataclass
class SeriesTruth:
    base: float
    weekday_add: np.ndarray  # [7], entry 0 == 0
    promo_add: np.ndarray  # [7], bump per weekday
    holiday_add: np.ndarray  # [2], by promo state (0: no promo, 1: promo)
    elasticity: float
    days: list[date]
    weekday: np.ndarray
    promo: np.ndarray
    holiday: np.ndarray
    relprice: np.ndarray
    price: np.ndarray
    level: np.ndarray
    weekday_eff: np.ndarray
    price_eff: np.ndarray
    promo_eff: np.ndarray
    holiday_eff: np.ndarray
    noise: np.ndarray
    sales: np.ndarray  # post-truncation


@dataclass
class GroundTruth:
    spec: SyntheticSpec
    series: dict[str, SeriesTruth] = field(default_factory=dict)

    def decomposition_sum(self, key: str) -> np.ndarray:
        s = self.series[key]
        return s.level + s.weekday_eff + s.price_eff + s.promo_eff + s.holiday_eff


def _price_path(rng: np.random.Generator, n_days: int, base_price: float) -> np.ndarray:
    """Base price with occasional multi-day excursions."""
    price = np.full(n_days, base_price)
    t = 0
    while t < n_days:
        if rng.random() < 0.05:
            depth = rng.uniform(-0.25, 0.20)
            length = int(rng.integers(3, 10))
            price[t : t + length] = base_price * (1.0 + depth)
            t += length
        else:
            t += 1
    return price


def generate(spec: SyntheticSpec) -> GroundTruth:
    """Sales panel plus exact per-day effect decomposition."""
    truth = GroundTruth(spec=spec)
    days = [START_DAY + timedelta(days=t) for t in range(spec.n_days)]
    weekday = np.array([d.weekday() for d in days])

    # holidays are calendar events shared across all series
    holiday_rng = stream(spec.seed, "synth.holidays")
    holiday = (holiday_rng.random(spec.n_days) < spec.holiday_prob).astype(np.float64)

    truncated_total = 0
    for s in range(spec.n_series):
        rng = stream(spec.seed, "synth.series", s)
        base = float(np.exp(rng.uniform(np.log(spec.base_min), np.log(spec.base_max))))
        weekday_add = (
            np.concatenate([[0.0], rng.uniform(-0.35, 0.5, size=6) * base])
            * spec.weekday_scale
        )
        promo_add = rng.uniform(0.2, 0.6, size=7) * base
        holiday_add = np.array(
            [rng.uniform(0.3, 0.7) * base, rng.uniform(-0.1, 0.3) * base]
        )
        elasticity = float(rng.uniform(*spec.price_elasticity_range))

        promo = (rng.random(spec.n_days) < spec.promo_prob).astype(np.float64)
        price = _price_path(rng, spec.n_days, base_price=float(rng.uniform(2.0, 20.0)))
        relprice = (price - rolling_mean_inclusive(price, PRICE_WINDOW)) / (
            rolling_mean_inclusive(price, PRICE_WINDOW)
        )
        noise = rng.normal(0.0, spec.noise_scale * base, size=spec.n_days)

        level = np.full(spec.n_days, base)
        wd_eff = weekday_add[weekday]
        if spec.multiplicative:
            # stress variant: each layer scales what is already there,
            # emitted as the equivalent sequential additive contributions
            wd_eff = base * (weekday_add[weekday] / base)
            promo_eff = (level + wd_eff) * (promo_add[weekday] / base) * promo
            holiday_state = promo.astype(int)
            holiday_eff = (
                (level + wd_eff + promo_eff)
                * (holiday_add[holiday_state] / base)
                * holiday
            )
            price_eff = elasticity * relprice * (level + wd_eff + promo_eff + holiday_eff)
        else:
            promo_eff = promo_add[weekday] * promo
            holiday_state = promo.astype(int)
            holiday_eff = holiday_add[holiday_state] * holiday
            price_eff = elasticity * relprice * base

        raw = level + wd_eff + price_eff + promo_eff + holiday_eff + noise
        sales = np.maximum(raw, 0.0)
        truncated = int((raw < 0).sum())
        truncated_total += truncated
        if truncated > 0.5 * spec.n_days:
            logger.warning(
                "series %d: %.0f%% of days truncated at zero",
                s, 100.0 * truncated / spec.n_days,
            )

        truth.series[f"SYN{s:03d}/S0"] = SeriesTruth(
            base=base,
            weekday_add=weekday_add,
            promo_add=promo_add,
            holiday_add=holiday_add,
            elasticity=elasticity,
            days=days,
            weekday=weekday.astype(np.float64),
            promo=promo,
            holiday=holiday,
            relprice=relprice,
            price=price,
            level=level,
            weekday_eff=wd_eff,
            price_eff=price_eff,
            promo_eff=promo_eff,
            holiday_eff=holiday_eff,
            noise=noise,
            sales=sales,
        )
    return truth


def write_sales_csv(truth: GroundTruth, path: str | Path) -> None:
    """Long-format panel consumable by the ingestion schema."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["product", "store", "date", "sales", "price", "promo", "holiday"])
        for key, s in truth.series.items():
            product, store = key.split("/")
            for t, day in enumerate(s.days):
                writer.writerow(
                    [
                        product,
                        store,
                        day.isoformat(),
                        f"{s.sales[t]:.6f}",
                        f"{s.price[t]:.4f}",
                        int(s.promo[t]),
                        int(s.holiday[t]),
                    ]
                )


def write_truth_csv(truth: GroundTruth, path: str | Path) -> None:
    """Per-day ground-truth decomposition, same keying as the sales file."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "product", "store", "date", "level", "weekday_effect",
                "price_effect", "promotion_effect", "holiday_effect", "noise",
            ]
        )
        for key, s in truth.series.items():
            product, store = key.split("/")
            for t, day in enumerate(s.days):
                writer.writerow(
                    [
                        product, store, day.isoformat(),
                        f"{s.level[t]:.6f}", f"{s.weekday_eff[t]:.6f}",
                        f"{s.price_eff[t]:.6f}", f"{s.promo_eff[t]:.6f}",
                        f"{s.holiday_eff[t]:.6f}", f"{s.noise[t]:.6f}",
                    ]
                )


def default_schema_dict() -> dict:
    return {
        "product_col": "product",
        "store_col": "store",
        "date_col": "date",
        "sales_col": "sales",
        "price_col": "price",
        "promotion_col": "promo",
        "holiday_col": "holiday",
    }
