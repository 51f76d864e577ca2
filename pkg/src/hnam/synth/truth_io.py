"""Reading a generated ground-truth bundle back from disk.

A synthetic run leaves three files side by side: sales.csv (the panel),
truth.csv (per-day effect decomposition), and truth_params.json
(per-series parameter tables plus the generator spec). Together they
rebuild the GroundTruth object the recovery scorer consumes.
"""

from __future__ import annotations

import csv
import json
from datetime import date
from pathlib import Path

import numpy as np

from ..errors import DataError
from .generator import GroundTruth, SeriesTruth, SyntheticSpec


def write_truth_params(truth: GroundTruth, path: str | Path) -> None:
    payload = {
        "spec": truth.spec.to_dict(),
        "series": {
            key: {
                "base": s.base,
                "weekday_add": s.weekday_add.tolist(),
                "promo_add": s.promo_add.tolist(),
                "holiday_add": s.holiday_add.tolist(),
                "elasticity": s.elasticity,
                "relprice": s.relprice.tolist(),
                "promo": s.promo.tolist(),
                "holiday": s.holiday.tolist(),
            }
            for key, s in truth.series.items()
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def read_truth(directory: str | Path) -> GroundTruth:
    """Rebuild GroundTruth from a synth output directory."""
    directory = Path(directory)
    if directory.is_file():
        directory = directory.parent
    truth_csv = directory / "truth.csv"
    params_json = directory / "truth_params.json"
    for p in (truth_csv, params_json):
        if not p.exists():
            raise DataError(f"missing ground-truth file {p}")

    with open(params_json) as fh:
        params = json.load(fh)
    spec = SyntheticSpec(
        **{
            **params["spec"],
            "price_elasticity_range": tuple(params["spec"]["price_elasticity_range"]),
        }
    )

    rows: dict[str, list[dict]] = {}
    with open(truth_csv, newline="") as fh:
        for row in csv.DictReader(fh):
            key = f"{row['product']}/{row['store']}"
            rows.setdefault(key, []).append(row)

    truth = GroundTruth(spec=spec)
    for key, recs in rows.items():
        recs.sort(key=lambda r: r["date"])
        days = [date.fromisoformat(r["date"]) for r in recs]
        p = params["series"][key]
        level = np.array([float(r["level"]) for r in recs])
        wd_eff = np.array([float(r["weekday_effect"]) for r in recs])
        price_eff = np.array([float(r["price_effect"]) for r in recs])
        promo_eff = np.array([float(r["promotion_effect"]) for r in recs])
        holiday_eff = np.array([float(r["holiday_effect"]) for r in recs])
        noise = np.array([float(r["noise"]) for r in recs])
        raw = level + wd_eff + price_eff + promo_eff + holiday_eff + noise
        truth.series[key] = SeriesTruth(
            base=float(p["base"]),
            weekday_add=np.array(p["weekday_add"]),
            promo_add=np.array(p["promo_add"]),
            holiday_add=np.array(p["holiday_add"]),
            elasticity=float(p["elasticity"]),
            days=days,
            weekday=np.array([d.weekday() for d in days], dtype=np.float64),
            promo=np.array(p["promo"]),
            holiday=np.array(p["holiday"]),
            relprice=np.array(p["relprice"]),
            price=np.zeros(len(days)),
            level=level,
            weekday_eff=wd_eff,
            price_eff=price_eff,
            promo_eff=promo_eff,
            holiday_eff=holiday_eff,
            noise=noise,
            sales=np.maximum(raw, 0.0),
        )
    return truth


def read_truth_csv(path: str | Path) -> GroundTruth:
    """Entry point used by the CLI; accepts the directory or any file in it."""
    return read_truth(path)
