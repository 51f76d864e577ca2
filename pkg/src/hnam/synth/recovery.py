"""Scoring a model's claimed effect decomposition against generator truth."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .generator import GroundTruth


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    sorted_vals = values[order]
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0
        i = j + 1
    return ranks


def rank_correlation(a: np.ndarray, b: np.ndarray) -> float:
    """Spearman with average ranks; degenerate inputs report 0."""
    ra, rb = _average_ranks(np.asarray(a)), _average_ranks(np.asarray(b))
    if ra.std() == 0 or rb.std() == 0:
        return 0.0
    return float(np.corrcoef(ra, rb)[0, 1])


@dataclass
class SeriesRecovery:
    weekday_rank_corr: float
    promo_mad: float
    promo_mad_ratio: float
    price_sign_agreement: float
    level_mean_pred: float
    level_true: float
    n_days: int


@dataclass
class RecoveryReport:
    weekday_rank_corr: float
    promo_mad_ratio: float
    price_sign_agreement: float
    level_r2: float
    per_series: dict[str, SeriesRecovery] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "weekday_rank_corr": self.weekday_rank_corr,
            "promo_mad_ratio": self.promo_mad_ratio,
            "price_sign_agreement": self.price_sign_agreement,
            "level_r2": self.level_r2,
            "per_series": {
                k: {
                    "weekday_rank_corr": v.weekday_rank_corr,
                    "promo_mad": v.promo_mad,
                    "promo_mad_ratio": v.promo_mad_ratio,
                    "price_sign_agreement": v.price_sign_agreement,
                    "level_mean_pred": v.level_mean_pred,
                    "level_true": v.level_true,
                    "n_days": v.n_days,
                }
                for k, v in self.per_series.items()
            },
        }


def collect_day_effects(records: list[dict]) -> dict[str, dict[date, dict]]:
    """Per (series, day) averaged predicted components.

    Records are composed-forecast dicts extended with `series` and `origin`;
    a day forecast from several origins contributes the mean prediction.
    """
    acc: dict[str, dict[date, dict[str, list[float]]]] = {}
    for record in records:
        key = record["series"]
        origin = date.fromisoformat(record["origin"])
        horizon = record["horizon"]
        for step in range(horizon):
            day = date.fromordinal(origin.toordinal() + step)
            slot = acc.setdefault(key, {}).setdefault(day, {})
            slot.setdefault("level", []).append(record["level"][step])
            for name, values in record["effects"].items():
                slot.setdefault(f"effect.{name}", []).append(values[step])
    return {
        key: {
            day: {name: float(np.mean(vals)) for name, vals in comps.items()}
            for day, comps in by_day.items()
        }
        for key, by_day in acc.items()
    }


def score_recovery(
    records: list[dict],
    truth: GroundTruth,
    min_price_move: float = 0.05,
) -> RecoveryReport:
    """How well the claimed decomposition matches the generator's.

    (a) rank correlation of mean predicted weekday effect vs the true
    weekday vector, averaged over series; (b) promotion effect by weekday,
    mean absolute deviation relative to the true promotion magnitude;
    (c) sign agreement of price effects on days with a material relative
    price move; (d) share of cross-series level variance explained.
    """
    day_effects = collect_day_effects(records)
    per_series: dict[str, SeriesRecovery] = {}

    for key, by_day in sorted(day_effects.items()):
        s = truth.series[key]
        day_lookup = {d: t for t, d in enumerate(s.days)}

        wd_pred_sum = np.zeros(7)
        wd_count = np.zeros(7)
        promo_pred = [[] for _ in range(7)]
        sign_hits = 0
        sign_total = 0
        level_pred: list[float] = []

        for day, comps in by_day.items():
            t = day_lookup.get(day)
            if t is None:
                continue
            wd = int(s.weekday[t])
            wd_eff = comps.get("effect.weekday", 0.0)
            wd_pred_sum[wd] += wd_eff
            wd_count[wd] += 1
            level_pred.append(comps["level"])
            if s.promo[t] > 0 and "effect.promotion" in comps:
                promo_pred[wd].append(comps["effect.promotion"])
            if "effect.relative_price" in comps and abs(s.relprice[t]) > min_price_move:
                true_sign = np.sign(s.elasticity * s.relprice[t])
                pred_sign = np.sign(comps["effect.relative_price"])
                sign_total += 1
                if pred_sign == true_sign:
                    sign_hits += 1

        seen = wd_count > 0
        wd_mean = np.zeros(7)
        wd_mean[seen] = wd_pred_sum[seen] / wd_count[seen]
        corr = rank_correlation(wd_mean[seen], s.weekday_add[seen]) if seen.sum() >= 3 else 0.0

        deviations = [
            abs(float(np.mean(vals)) - s.promo_add[wd])
            for wd, vals in enumerate(promo_pred)
            if vals
        ]
        promo_mad = float(np.mean(deviations)) if deviations else float("nan")
        promo_scale = float(np.mean(np.abs(s.promo_add)))
        per_series[key] = SeriesRecovery(
            weekday_rank_corr=corr,
            promo_mad=promo_mad,
            promo_mad_ratio=promo_mad / promo_scale if deviations else float("nan"),
            price_sign_agreement=sign_hits / sign_total if sign_total else float("nan"),
            level_mean_pred=float(np.mean(level_pred)) if level_pred else float("nan"),
            level_true=s.base,
            n_days=len(by_day),
        )

    corrs = [v.weekday_rank_corr for v in per_series.values()]
    mads = [v.promo_mad_ratio for v in per_series.values() if np.isfinite(v.promo_mad_ratio)]
    sign_scores = [
        v.price_sign_agreement
        for v in per_series.values()
        if np.isfinite(v.price_sign_agreement)
    ]

    levels_true = np.array([v.level_true for v in per_series.values()])
    levels_pred = np.array([v.level_mean_pred for v in per_series.values()])
    if len(levels_true) >= 2 and np.isfinite(levels_pred).all():
        ss_res = float(((levels_pred - levels_true) ** 2).sum())
        ss_tot = float(((levels_true - levels_true.mean()) ** 2).sum())
        level_r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    else:
        level_r2 = float("nan")

    return RecoveryReport(
        weekday_rank_corr=float(np.mean(corrs)) if corrs else 0.0,
        promo_mad_ratio=float(np.mean(mads)) if mads else float("nan"),
        price_sign_agreement=float(np.mean(sign_scores)) if sign_scores else float("nan"),
        level_r2=level_r2,
        per_series=per_series,
    )


def records_from_truth(
    truth: GroundTruth, origins: list[date], horizon: int = 14
) -> list[dict]:
    """Composed-forecast records copied straight from the ground truth
    (a perfect model, used to validate the scorer itself)."""
    records = []
    for key, s in truth.series.items():
        day_lookup = {d: t for t, d in enumerate(s.days)}
        for origin in origins:
            t0 = day_lookup[origin]
            steps = range(t0, t0 + horizon)
            records.append(
                {
                    "series": key,
                    "origin": origin.isoformat(),
                    "horizon": horizon,
                    "level": [s.level[t] for t in steps],
                    "effects": {
                        "weekday": [s.weekday_eff[t] for t in steps],
                        "relative_price": [s.price_eff[t] for t in steps],
                        "promotion": [s.promo_eff[t] for t in steps],
                        "holiday": [s.holiday_eff[t] for t in steps],
                    },
                }
            )
    return records
