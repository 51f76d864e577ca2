"""Command-line entry points driving the pipeline, training, and serving."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from datetime import date
from pathlib import Path

from ..data import (
    Panel,
    SchemaConfig,
    SelectionCriteria,
    SeriesKey,
    ingest_csv,
    make_windows,
    save_samples,
    select_series,
)
from ..errors import ConfigError, DataError, DivergenceError, FitError, HnamError
from ..evaluation import write_report
from ..model import HnamModel
from ..runner import (
    all_origins,
    default_test_months,
    evaluate_rolling,
    prepare,
    train_rolling_models,
)
from ..synth import (
    SyntheticSpec,
    default_schema_dict,
    generate,
    score_recovery,
    write_sales_csv,
    write_truth_csv,
)
from ..tensor.memory import configure_allocator
from ..tensor.snapshot import load_snapshot, snapshot_digest
from ..train import TrainConfig
from .core import ForecastService, ServiceError
from .server import ForecastHttpServer

logger = logging.getLogger(__name__)


def _error_class(exc: Exception) -> str:
    if isinstance(exc, ServiceError):
        return exc.error_class
    if isinstance(exc, (ConfigError, FileNotFoundError, json.JSONDecodeError)):
        return "CONFIG"
    if isinstance(exc, FitError):
        return "FIT"
    if isinstance(exc, DivergenceError):
        return "DIVERGENCE"
    if isinstance(exc, DataError):
        return "DATA"
    if isinstance(exc, HnamError):
        return "ERROR"
    return "INTERNAL"


def _load_json(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _load_dataset(args):
    schema = SchemaConfig.from_file(args.schema)
    return ingest_csv(args.data, schema)


def _train_config(cfg: dict) -> TrainConfig:
    fields = {
        k: cfg[k]
        for k in (
            "lr", "weight_decay", "batch_size", "max_epochs_initial",
            "max_epochs_finetune", "patience", "seed", "grad_clip",
        )
        if k in cfg
    }
    return TrainConfig(**fields)


def _criteria(cfg: dict) -> SelectionCriteria:
    fields = {
        k: cfg[k]
        for k in (
            "min_presale_days", "max_zero_gap", "min_median_sales",
            "top_n_sales", "top_n_revenue", "max_missing_frac",
        )
        if k in cfg
    }
    return SelectionCriteria(**fields)


def _remap_labels(dataset, column: str, snapshot_labels: list[str]) -> None:
    """Re-encode one categorical column to the snapshot's vocabulary.

    Labels unseen at training time map to the reference category (zero
    effect) with a warning, since the model has no coefficient for them.
    """
    current = getattr(dataset, f"{column}_labels")
    if current == snapshot_labels:
        return
    code_map = {}
    unseen = []
    snapshot_index = {label: i for i, label in enumerate(snapshot_labels)}
    for code, label in enumerate(current):
        if label in snapshot_index:
            code_map[code] = snapshot_index[label]
        else:
            code_map[code] = 0
            unseen.append(label)
    if unseen:
        logger.warning(
            "%s labels %s were not in the training vocabulary; mapping to the "
            "reference category (zero effect)", column, unseen,
        )
    for records in dataset.series.values():
        for r in records:
            setattr(r, column, code_map[getattr(r, column)])
    setattr(dataset, f"{column}_labels", list(snapshot_labels))


def _snapshot_context(args):
    """Model + panel rebuilt with the vocabularies recorded at training time."""
    _, manifest = load_snapshot(args.snapshot)
    model = HnamModel.load(args.snapshot)
    dataset = _load_dataset(args)
    meta = manifest["meta"]
    recorded = meta.get("series_keys")
    if recorded:
        keys = [SeriesKey.parse(k) for k in recorded]
        missing = [k for k in keys if k not in dataset.series]
        if missing:
            raise DataError(f"data file lacks snapshot series: {missing[:3]}")
    else:
        keys = sorted(dataset.series)
    if meta.get("promotion_labels"):
        _remap_labels(dataset, "promotion", meta["promotion_labels"])
    if meta.get("holiday_labels"):
        _remap_labels(dataset, "holiday", meta["holiday_labels"])
    panel = Panel.build(dataset, keys)
    return model, panel, keys


# -- subcommands ---------------------------------------------------------------


def cmd_synth(args) -> int:
    overrides = _load_json(args.config)
    if "price_elasticity_range" in overrides:
        overrides["price_elasticity_range"] = tuple(overrides["price_elasticity_range"])
    spec = SyntheticSpec(**overrides)
    truth = generate(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sales_csv(truth, out / "sales.csv")
    write_truth_csv(truth, out / "truth.csv")
    from ..synth.truth_io import write_truth_params

    write_truth_params(truth, out / "truth_params.json")
    with open(out / "schema.json", "w") as fh:
        json.dump(default_schema_dict(), fh, indent=2)
    with open(out / "spec.json", "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
    print(f"wrote {spec.n_series} series x {spec.n_days} days to {out}")
    return 0


def cmd_ingest(args) -> int:
    cfg = _load_json(args.config)
    dataset = _load_dataset(args)
    test_start = (
        date.fromisoformat(args.test_start)
        if args.test_start
        else default_first_test_start(dataset, cfg)
    )
    keys = select_series(dataset, _criteria(cfg.get("criteria", {})), test_start)
    print(f"{len(dataset.series)} series ingested, {len(keys)} selected")
    for key in keys:
        print(f"  {key}")
    if args.out:
        prepared = prepare(
            dataset, test_start, _criteria(cfg.get("criteria", {})),
            model_overrides=cfg.get("model", {}),
        )
        origins = all_origins(prepared.panel, prepared.config)
        samples = make_windows(
            prepared.panel, prepared.config, origins, keys=prepared.keys,
            origin_stride=int(cfg.get("origin_stride", 1)),
        )
        save_samples(args.out, samples)
        print(f"cached {len(samples)} window samples to {args.out}")
    return 0


def default_first_test_start(dataset, cfg: dict) -> date:
    last = max(recs[-1].day for recs in dataset.series.values())
    months = int(cfg.get("months", 5))
    month_len = int(cfg.get("month_len", 30))
    horizon = int(cfg.get("model", {}).get("horizon", 14))
    from ..evaluation import fixed_test_months

    return fixed_test_months(last, months, month_len, horizon)[0][0]


def cmd_train(args) -> int:
    configure_allocator()
    cfg = _load_json(args.config)
    dataset = _load_dataset(args)
    test_start = (
        date.fromisoformat(args.test_start)
        if args.test_start
        else default_first_test_start(dataset, cfg)
    )
    prepared = prepare(
        dataset, test_start, _criteria(cfg.get("criteria", {})),
        model_overrides=cfg.get("model", {}),
    )
    tc = _train_config(cfg.get("train", {}))
    models, logs = train_rolling_models(
        prepared, tc, [[test_start]],
        origin_stride=int(cfg.get("origin_stride", 1)),
        max_epochs_initial=cfg.get("train", {}).get("max_epochs_initial"),
        manifest_dir=Path(args.out).parent,
    )
    models[0].save(
        args.out,
        extra_meta={
            "series_keys": [str(k) for k in prepared.keys],
            "test_start": test_start.isoformat(),
            "dataset_digest": prepared.dataset_digest,
            "promotion_labels": dataset.promotion_labels,
            "holiday_labels": dataset.holiday_labels,
        },
    )
    log = logs[0]
    print(
        f"trained {len(log.epochs)} epochs; best epoch {log.best_epoch} "
        f"val {log.best_val_loss:.5f}; saved {args.out}"
    )
    return 0


def cmd_finetune(args) -> int:
    configure_allocator()
    cfg = _load_json(args.config)
    model, panel, keys = _snapshot_context(args)
    test_start = date.fromisoformat(args.test_start)
    from ..data import fit_continuous_stats, split_train_val
    from ..train import finetune

    origins = all_origins(panel, model.config)
    train_origins, val_origins = split_train_val(
        [o for o in origins if o < test_start], test_start
    )
    stride = int(cfg.get("origin_stride", 1))
    train_samples = make_windows(
        panel, model.config, train_origins, keys=keys, origin_stride=stride
    )
    val_samples = make_windows(
        panel, model.config, val_origins, keys=keys, target_limit=test_start
    )
    tc = _train_config(cfg.get("train", {}))
    model, log = finetune(model, train_samples, val_samples, tc)
    model.save(
        args.out,
        extra_meta={
            "series_keys": [str(k) for k in keys],
            "test_start": test_start.isoformat(),
        },
    )
    print(
        f"fine-tuned {len(log.epochs) - 1} epochs; best epoch {log.best_epoch} "
        f"val {log.best_val_loss:.5f}; saved {args.out}"
    )
    return 0


def cmd_evaluate(args) -> int:
    configure_allocator()
    cfg = _load_json(args.config)
    dataset = _load_dataset(args)
    test_start = (
        date.fromisoformat(args.test_start)
        if args.test_start
        else default_first_test_start(dataset, cfg)
    )
    prepared = prepare(
        dataset, test_start, _criteria(cfg.get("criteria", {})),
        model_overrides=cfg.get("model", {}),
    )
    months = default_test_months(
        prepared, int(cfg.get("months", 5)), int(cfg.get("month_len", 30))
    )
    tc = _train_config(cfg.get("train", {}))
    out_dir = Path(args.out_dir)
    models, logs = train_rolling_models(
        prepared, tc, months,
        origin_stride=int(cfg.get("origin_stride", 1)),
        max_epochs_initial=cfg.get("train", {}).get("max_epochs_initial"),
        max_epochs_finetune=cfg.get("train", {}).get("max_epochs_finetune"),
        manifest_dir=out_dir,
    )
    report = evaluate_rolling(prepared, models, months)
    write_report(report, out_dir)
    for name, agg in report.aggregates.items():
        print(
            f"{name}: median std RMSE {agg['std_rmse']['median']:.4f}, "
            f"median SMAPE {agg['smape']['median']:.4f}, "
            f"rank-1 {report.rank_freq[name]['first']:.1f}%"
        )
    if args.truth:
        from ..synth.truth_io import read_truth_csv

        truth = read_truth_csv(args.truth)
        recovery = score_recovery(report.decompositions, truth)
        with open(out_dir / "recovery.json", "w") as fh:
            json.dump(recovery.to_dict(), fh, indent=2)
        print(
            f"recovery: weekday rank corr {recovery.weekday_rank_corr:.3f}, "
            f"promo MAD ratio {recovery.promo_mad_ratio:.3f}, "
            f"price sign agreement {recovery.price_sign_agreement:.3f}"
        )
    print(f"report written to {out_dir}")
    return 0


def cmd_forecast(args) -> int:
    model, panel, keys = _snapshot_context(args)
    service = ForecastService(
        model, panel, keys,
        adjustment_log=Path(args.out_dir) / "adjustments.jsonl",
        snapshot_hash=snapshot_digest(args.snapshot),
    )
    body = service.forecast(args.series, args.origin)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tag = f"{args.series.replace('/', '_')}_{args.origin}"
    with open(out_dir / f"forecast_{tag}.json", "w") as fh:
        json.dump(body, fh, indent=2)
    plot_path = out_dir / f"plotdata_{tag}.csv"
    with open(plot_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "component", "value"])
        for step in range(body["horizon"]):
            writer.writerow([step, "level", body["level"][step]])
            for name in body["covariates"]:
                writer.writerow([step, f"effect:{name}", body["effects"][name][step]])
            writer.writerow([step, "prediction", body["prediction"][step]])
            writer.writerow(
                [step, "truncated_prediction", body["truncated_prediction"][step]]
            )
            if body.get("actuals") is not None:
                writer.writerow([step, "actual", body["actuals"][step]])
    print(f"forecast {body['id']} written to {out_dir}")
    return 0


def cmd_serve(args) -> int:
    configure_allocator()
    model, panel, keys = _snapshot_context(args)
    service = ForecastService(
        model, panel, keys,
        adjustment_log=args.adjustment_log,
        snapshot_hash=snapshot_digest(args.snapshot),
    )
    server = ForecastHttpServer(
        service, host=args.host, port=args.port, static_dir=args.static
    )
    print(f"serving on http://{args.host}:{server.port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


# -- argument wiring -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hnam",
        description="Interpretable demand forecasting: composed level plus "
        "hierarchical covariate effects.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset with ground truth")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="JSON overriding generator settings")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("ingest", help="validate a dataset and report selection")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--test-start", help="ISO date of the first test month")
    p.add_argument("--out", help="optional binary sample-store path")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("train", help="train the initial model for a test month")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--test-start", help="ISO date of the test month")
    p.add_argument("--out", required=True, help="snapshot output path")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("finetune", help="fine-tune a snapshot for a new test month")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--test-start", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_finetune)

    p = sub.add_parser("evaluate", help="rolling evaluation against baselines")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--test-start", help="ISO date of the first test month")
    p.add_argument("--truth", help="ground-truth CSV for recovery scoring")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("forecast", help="emit one composed forecast + plot data")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--series", required=True, help="product/store key")
    p.add_argument("--origin", required=True, help="ISO date")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(fn=cmd_forecast)

    p = sub.add_parser("serve", help="run the forecast service")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--static", help="static asset directory for the console")
    p.add_argument("--adjustment-log", default="adjustments.jsonl")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except Exception as exc:
        print(f"ERROR {_error_class(exc)}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
