"""Long-format CSV ingestion into calendar-aligned daily records."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import NamedTuple

from ..errors import ConfigError, DataError


class SeriesKey(NamedTuple):
    product_id: str
    store_id: str

    def __str__(self) -> str:
        return f"{self.product_id}/{self.store_id}"

    @classmethod
    def parse(cls, text: str) -> "SeriesKey":
        if "/" not in text:
            raise DataError(f"series key {text!r} must look like product/store")
        product, store = text.split("/", 1)
        return cls(product, store)


@dataclass
class SchemaConfig:
    """Column mapping for a long-format dataset file."""

    product_col: str
    store_col: str
    date_col: str
    sales_col: str
    price_col: str | None = None
    promotion_col: str | None = None
    holiday_col: str | None = None
    snap_col: str | None = None
    delimiter: str = ","

    @classmethod
    def from_file(cls, path: str | Path) -> "SchemaConfig":
        with open(path) as fh:
            raw = json.load(fh)
        required = ("product_col", "store_col", "date_col", "sales_col")
        missing = [k for k in required if k not in raw]
        if missing:
            raise ConfigError(f"schema config missing keys: {missing}")
        known = {
            k: raw[k]
            for k in (
                "product_col",
                "store_col",
                "date_col",
                "sales_col",
                "price_col",
                "promotion_col",
                "holiday_col",
                "snap_col",
                "delimiter",
            )
            if k in raw
        }
        return cls(**known)


@dataclass
class DailyRecord:
    day: date
    sales: float
    price: float | None
    promotion: int
    holiday: int
    snap: int
    missing: bool

    @property
    def weekday(self) -> int:
        return self.day.weekday()


@dataclass
class Dataset:
    """Aligned records per series plus the categorical vocabularies."""

    series: dict[SeriesKey, list[DailyRecord]]
    promotion_labels: list[str] = field(default_factory=lambda: ["0"])
    holiday_labels: list[str] = field(default_factory=lambda: ["0"])
    has_price: bool = False
    has_promotion: bool = False
    has_holiday: bool = False
    has_snap: bool = False

    @property
    def keys(self) -> list[SeriesKey]:
        return sorted(self.series)

    def start_date(self) -> date:
        return min(recs[0].day for recs in self.series.values())

    def end_date(self) -> date:
        return max(recs[-1].day for recs in self.series.values())


_NONE_LABELS = {"", "0", "none", "no", "false"}


def _canonical_label(raw: str) -> str | None:
    """None-like labels collapse to the reference category."""
    return None if raw.strip().lower() in _NONE_LABELS else raw.strip()


def ingest_csv(path: str | Path, schema: SchemaConfig) -> Dataset:
    """Parse, type, and calendar-align a long-format file.

    Skipped calendar days are reified as explicit records flagged missing
    (sales 0, price carried forward). Parse failures name the offending
    line number.
    """
    rows: dict[SeriesKey, dict[date, dict]] = {}
    promo_labels: set[str] = set()
    holiday_labels: set[str] = set()

    with open(path, newline="") as fh:
        reader = csv.DictReader(fh, delimiter=schema.delimiter)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        for col in (schema.product_col, schema.store_col, schema.date_col, schema.sales_col):
            if col not in reader.fieldnames:
                raise DataError(f"{path}: mapped column {col!r} not in header")
        for col in (schema.price_col, schema.promotion_col, schema.holiday_col, schema.snap_col):
            if col is not None and col not in reader.fieldnames:
                raise DataError(f"{path}: mapped column {col!r} not in header")

        for line_no, row in enumerate(reader, start=2):
            try:
                day = date.fromisoformat(row[schema.date_col].strip())
            except ValueError as exc:
                raise DataError(f"{path}, line {line_no}: bad date: {exc}") from exc
            key = SeriesKey(row[schema.product_col].strip(), row[schema.store_col].strip())
            sales_raw = row[schema.sales_col].strip()
            try:
                sales = float(sales_raw) if sales_raw else None
            except ValueError as exc:
                raise DataError(
                    f"{path}, line {line_no}: bad sales value {sales_raw!r}"
                ) from exc
            if sales is not None and sales < 0:
                raise DataError(f"{path}, line {line_no}: negative sales {sales}")
            price = None
            if schema.price_col:
                praw = row[schema.price_col].strip()
                if praw:
                    try:
                        price = float(praw)
                    except ValueError as exc:
                        raise DataError(
                            f"{path}, line {line_no}: bad price value {praw!r}"
                        ) from exc
                    if price <= 0:
                        raise DataError(
                            f"{path}, line {line_no}: non-positive price {price}"
                        )
            promo = None
            if schema.promotion_col:
                promo = _canonical_label(row[schema.promotion_col])
                if promo is not None:
                    promo_labels.add(promo)
            holiday = None
            if schema.holiday_col:
                holiday = _canonical_label(row[schema.holiday_col])
                if holiday is not None:
                    holiday_labels.add(holiday)
            snap = 0
            if schema.snap_col:
                snap = 0 if _canonical_label(row[schema.snap_col]) is None else 1
            rows.setdefault(key, {})[day] = {
                "sales": sales,
                "price": price,
                "promotion": promo,
                "holiday": holiday,
                "snap": snap,
            }

    if not rows:
        raise DataError(f"{path}: no data rows")

    promo_vocab = {label: i + 1 for i, label in enumerate(sorted(promo_labels))}
    holiday_vocab = {label: i + 1 for i, label in enumerate(sorted(holiday_labels))}

    series: dict[SeriesKey, list[DailyRecord]] = {}
    for key, by_day in rows.items():
        first, last = min(by_day), max(by_day)
        records: list[DailyRecord] = []
        last_price: float | None = None
        day = first
        while day <= last:
            cell = by_day.get(day)
            if cell is None or cell["sales"] is None:
                price = cell["price"] if cell else None
                if price is None:
                    price = last_price
                records.append(
                    DailyRecord(
                        day=day, sales=0.0, price=price,
                        promotion=0, holiday=0, snap=0, missing=True,
                    )
                )
                if price is not None:
                    last_price = price
            else:
                price = cell["price"] if cell["price"] is not None else last_price
                records.append(
                    DailyRecord(
                        day=day,
                        sales=cell["sales"],
                        price=price,
                        promotion=promo_vocab.get(cell["promotion"], 0),
                        holiday=holiday_vocab.get(cell["holiday"], 0),
                        snap=cell["snap"],
                        missing=False,
                    )
                )
                if price is not None:
                    last_price = price
            day += timedelta(days=1)
        # back-fill prices before the first observed one
        first_price = next((r.price for r in records if r.price is not None), None)
        for r in records:
            if r.price is None:
                r.price = first_price
            else:
                break
        series[key] = records

    return Dataset(
        series=series,
        promotion_labels=["0"] + sorted(promo_labels),
        holiday_labels=["0"] + sorted(holiday_labels),
        has_price=any(
            r.price is not None for recs in series.values() for r in recs
        ),
        has_promotion=schema.promotion_col is not None,
        has_holiday=schema.holiday_col is not None,
        has_snap=schema.snap_col is not None,
    )
