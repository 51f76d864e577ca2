"""End-to-end orchestration: select, window, train per test month, evaluate."""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

from .data import (
    Panel,
    SelectionCriteria,
    build_covariate_specs,
    fit_continuous_stats,
    make_windows,
    select_series,
    split_train_val,
)
from .data.ingest import Dataset, SeriesKey
from .errors import DataError
from .evaluation import (
    EvalReport,
    HnamEvalModel,
    HoltWintersModel,
    SeasonalNaiveModel,
    fixed_test_months,
    rolling_evaluate,
)
from .model import HnamConfig, HnamModel
from .train import TrainConfig, TrainLog, finetune, train

logger = logging.getLogger(__name__)

@dataclass
class PreparedData:
    panel: Panel
    keys: list[SeriesKey]
    config: HnamConfig
    dataset_digest: str

@dataclass
class RollingResult:
    prepared: PreparedData
    test_months: list[list[date]]
    models: list[HnamModel]
    logs: list[TrainLog]
    report: EvalReport | None = None

def dataset_digest(panel: Panel, keys: list[SeriesKey]) -> str:
    h = hashlib.sha256()
    for key in keys:
        h.update(str(key).encode())
        h.update(panel.tables[key].columns["sales"].tobytes())
    return h.hexdigest()[:16]

def prepare(
    dataset: Dataset,
    test_start: date,
    criteria: SelectionCriteria | None = None,
    model_overrides: dict | None = None,
) -> PreparedData:
    """Select series, engineer features, and build the model configuration."""
    criteria = criteria or SelectionCriteria()
    keys = select_series(dataset, criteria, test_start)
    if not keys:
        raise DataError("no series passed the selection criteria")
    panel = Panel.build(dataset, keys)
    specs, hierarchy = build_covariate_specs(dataset, panel)
    overrides = model_overrides or {}
    config = HnamConfig(covariates=specs, hierarchy=hierarchy, **overrides)
    return PreparedData(
        panel=panel,
        keys=keys,
        config=config,
        dataset_digest=dataset_digest(panel, keys),
    )

def all_origins(panel: Panel, config: HnamConfig) -> list[date]:
    """Every origin with full history and horizon coverage, over all series."""
    starts = []
    ends = []
    for table in panel.tables.values():
        starts.append(table.dates[0] + timedelta(days=config.history_length))
        ends.append(table.dates[-1] - timedelta(days=config.horizon - 1))
    lo, hi = min(starts), max(ends)
    return [lo + timedelta(days=i) for i in range((hi - lo).days + 1)]

def train_rolling_models(
    prepared: PreparedData,
    train_config: TrainConfig,
    test_months: list[list[date]],
    origin_stride: int = 1,
    max_epochs_initial: int | None = None,
    max_epochs_finetune: int | None = None,
    manifest_dir: str | Path | None = None,
) -> tuple[list[HnamModel], list[TrainLog]]:
    """Initial training before the first test month, fine-tuning before each
    subsequent one. Returns one model snapshot per test month."""
    panel, config = prepared.panel, prepared.config
    origins = all_origins(panel, config)
    models: list[HnamModel] = []
    logs: list[TrainLog] = []
    stats = None
    model: HnamModel | None = None

    for month_index, month in enumerate(test_months):
        month_start = month[0]
        train_origins, val_origins = split_train_val(
            [o for o in origins if o < month_start], month_start
        )
        t0 = time.perf_counter()
        train_samples = make_windows(
            panel, config, train_origins, keys=prepared.keys,
            origin_stride=origin_stride,
        )
        val_samples = make_windows(
            panel, config, val_origins, keys=prepared.keys,
            target_limit=month_start,
        )
        if month_index == 0:
            stats = fit_continuous_stats(train_samples, config)
            model = HnamModel(config, root_seed=train_config.seed, cont_stats=stats)
            model, log = train(
                model, train_samples, val_samples, train_config,
                max_epochs=max_epochs_initial,
            )
        else:
            # transformation statistics stay frozen from the initial fit so
            # effect semantics are stable across fine-tunes
            model = model.clone()
            tc = train_config
            if max_epochs_finetune is not None:
                tc = TrainConfig(**{**train_config.to_dict(), "max_epochs_finetune": max_epochs_finetune})
            model, log = finetune(model, train_samples, val_samples, tc)
        logger.info(
            "month %d: trained %d epochs (best %d, val %.5f) on %d samples in %.1fs",
            month_index + 1, len(log.epochs), log.best_epoch, log.best_val_loss,
            len(train_samples), time.perf_counter() - t0,
        )
        models.append(model)
        logs.append(log)
        if manifest_dir is not None:
            manifest = {
                "month_index": month_index,
                "month_start": month_start.isoformat(),
                "train_config": train_config.to_dict(),
                "seed": train_config.seed,
                "dataset_digest": prepared.dataset_digest,
                "n_train_samples": len(train_samples),
                "n_val_samples": len(val_samples),
                "log": log.to_dict(),
            }
            out = Path(manifest_dir)
            out.mkdir(parents=True, exist_ok=True)
            with open(out / f"run_month_{month_index + 1}.json", "w") as fh:
                json.dump(manifest, fh, indent=2)
    return models, logs

def evaluate_rolling(
    prepared: PreparedData,
    models: list[HnamModel],
    test_months: list[list[date]],
    include_baselines: bool = True,
    collect_decompositions: bool = True,
) -> EvalReport:
    horizon = prepared.config.horizon
    eval_models = [
        HnamEvalModel(
            prepared.panel, prepared.config, models,
            collect_decompositions=collect_decompositions,
        )
    ]
    if include_baselines:
        eval_models.append(SeasonalNaiveModel(prepared.panel, horizon))
        eval_models.append(HoltWintersModel(prepared.panel, horizon))
    return rolling_evaluate(
        eval_models, prepared.panel, prepared.keys, test_months, horizon
    )

def default_test_months(
    prepared: PreparedData, n_months: int = 5, month_len: int = 30
) -> list[list[date]]:
    last_day = max(t.dates[-1] for t in prepared.panel.tables.values())
    return fixed_test_months(
        last_day, n_months=n_months, month_len=month_len,
        horizon=prepared.config.horizon,
    )
