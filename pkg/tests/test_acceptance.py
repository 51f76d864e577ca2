"""Acceptance criteria, one test per criterion.

Each criterion prints a PASS/FAIL line (visible with `pytest -s` or in
acceptance_report.txt next to this file). Criteria 4 and 5 share one
trained-artifact fixture: the training budget belongs to criterion 4 and
the full rolling evaluation budget to criterion 5.
"""

import json
import time
from datetime import timedelta
from pathlib import Path

import numpy as np
import pytest

from helpers import (
    FIXTURE_CLEAN,
    FIXTURE_CRITERIA,
    FIXTURE_TEST_START,
    build_selection_fixture,
    random_bundle,
    small_config,
)

from hnam.data import SchemaConfig, ingest_csv, select_series
from hnam.evaluation import fixed_test_months, smape, standardized_errors
from hnam.evaluation.baselines import (
    _GRID,
    _initial_states,
    _run_grid,
    holt_winters_fit,
    holt_winters_forecast,
)
from hnam.model import Batch, HnamModel, compose_forecasts
from hnam.runner import (
    default_test_months,
    evaluate_rolling,
    prepare,
    train_rolling_models,
)
from hnam.synth import (
    SyntheticSpec,
    default_schema_dict,
    generate,
    score_recovery,
    write_sales_csv,
)
from hnam.tensor.memory import configure_allocator
from hnam.train import EarlyStopper, TrainConfig

REPORT_PATH = Path(__file__).parent / "acceptance_report.txt"
_lines: list[str] = []


def report(criterion: int, name: str, passed: bool, detail: str = ""):
    line = f"criterion {criterion:>2} {name:<28} {'PASS' if passed else 'FAIL'}  {detail}"
    _lines.append(line)
    print(line)
    REPORT_PATH.write_text("\n".join(_lines) + "\n")
    assert passed, line


# ---------------------------------------------------------------------------
# criteria 4 + 5 share one trained synthetic artifact


@pytest.fixture(scope="session")
def synthetic_run(tmp_path_factory):
    configure_allocator()
    t_start = time.perf_counter()
    spec = SyntheticSpec()  # the default: 20 series, 900 days
    truth = generate(spec)
    data_dir = tmp_path_factory.mktemp("synthetic")
    write_sales_csv(truth, data_dir / "sales.csv")
    dataset = ingest_csv(data_dir / "sales.csv", SchemaConfig(**default_schema_dict()))

    last_day = max(r[-1].day for r in dataset.series.values())
    first_test_start = fixed_test_months(last_day, 5, 30, 14)[0][0]
    prepared = prepare(dataset, test_start=first_test_start)
    months = default_test_months(prepared, n_months=5, month_len=30)
    train_config = TrainConfig(seed=0, patience=30)
    t_train = time.perf_counter()
    models, logs = train_rolling_models(
        prepared,
        train_config,
        months,
        origin_stride=4,
        max_epochs_initial=60,
        max_epochs_finetune=8,
    )
    train_minutes = (time.perf_counter() - t_train) / 60.0
    report_obj = evaluate_rolling(prepared, models, months)
    recovery = score_recovery(report_obj.decompositions, truth)
    total_minutes = (time.perf_counter() - t_start) / 60.0
    return {
        "truth": truth,
        "report": report_obj,
        "recovery": recovery,
        "train_minutes": train_minutes,
        "total_minutes": total_minutes,
        "logs": logs,
    }


# ---------------------------------------------------------------------------


def test_criterion_1_hierarchy_masking():
    """200 random (model, bundle) pairs, n_c=4, zero violations, bit-exact."""
    t0 = time.perf_counter()
    violations = 0
    for trial in range(200):
        rng = np.random.default_rng(1000 + trial)
        config = small_config(n_causal=4, d=8, T_h=7, T_f=3)
        assert config.hierarchy == ["weekday", "relative_price", "promotion", "holiday"]
        model = HnamModel(config, root_seed=trial)
        bundle = random_bundle(config, rng)
        batch = Batch.from_bundles([bundle])
        streams = model.embed_and_assemble(batch)
        _, emb = model.level_forward(streams)
        base = [model.coefficient_forward(i, streams, emb).data for i in range(4)]

        j = int(rng.integers(1, 4))
        mutated = random_bundle(config, rng)
        mutated.S, mutated.T, mutated.P = bundle.S, bundle.T, bundle.P
        mutated.C = bundle.C.copy()
        spec = config.causal[j]
        if spec.is_categorical:
            mutated.C[j] = (bundle.C[j] + 1 + rng.integers(0, spec.cardinality - 1)) % spec.cardinality
        else:
            mutated.C[j] = bundle.C[j] + rng.normal(size=bundle.C[j].shape)
        mstreams = model.embed_and_assemble(Batch.from_bundles([mutated]))
        _, memb = model.level_forward(mstreams)
        if not np.array_equal(memb.data, emb.data):
            violations += 1
        for i in range(j):
            out = model.coefficient_forward(i, mstreams, memb).data
            if not np.array_equal(out, base[i]):
                violations += 1
    elapsed = time.perf_counter() - t0
    report(
        1, "hierarchy masking", violations == 0 and elapsed < 60,
        f"0 violations required, got {violations}; {elapsed:.1f}s (<60s)",
    )


def test_criterion_2_additive_recomposition():
    """prediction = level + sum(effects) within 1e-9 relative, 1000 forwards."""
    t0 = time.perf_counter()
    checked = 0
    worst = 0.0
    trial = 0
    while checked < 1000:
        rng = np.random.default_rng(2000 + trial)
        config = small_config(n_causal=1 + trial % 4, d=8, T_h=7, T_f=3)
        model = HnamModel(config, root_seed=5000 + trial)
        bundles = [random_bundle(config, rng) for _ in range(8)]
        batch = Batch.from_bundles(bundles)
        forecasts = compose_forecasts(
            batch, model.forward(batch), [c.name for c in config.causal]
        )
        for fc in forecasts:
            resum = fc.level + fc.effects.sum(axis=0)
            rel = np.max(np.abs(fc.prediction - resum) / (1.0 + np.abs(fc.prediction)))
            worst = max(worst, float(rel))
            assert np.array_equal(
                fc.truncated_prediction, np.maximum(fc.prediction, 0.0)
            )
            checked += 1
        trial += 1
    elapsed = time.perf_counter() - t0
    report(
        2, "additive recomposition", worst <= 1e-9 and elapsed < 60,
        f"worst rel err {worst:.2e} (<=1e-9) over {checked} forwards; {elapsed:.1f}s",
    )


def test_criterion_3_gradient_integrity():
    """Full-model finite differences, d=8 T_h=6 T_f=3 n_c=2, rel err <= 1e-4."""
    from test_model_gradients import full_model_gradcheck

    t0 = time.perf_counter()
    worst, name = full_model_gradcheck(n_causal=2, d=8, T_h=6, T_f=3, seed=0)
    elapsed = time.perf_counter() - t0
    report(
        3, "gradient integrity", worst <= 1e-4 and elapsed < 120,
        f"max rel err {worst:.2e} (<=1e-4, worst at {name}); {elapsed:.0f}s (<120s)",
    )


def test_criterion_4_synthetic_recovery(synthetic_run):
    """Weekday rank corr >= 0.9, promo MAD <= 25%, price sign >= 90%."""
    rec = synthetic_run["recovery"]
    ok = (
        rec.weekday_rank_corr >= 0.9
        and rec.promo_mad_ratio <= 0.25
        and rec.price_sign_agreement >= 0.9
        and synthetic_run["train_minutes"] < 30
    )
    report(
        4, "synthetic recovery", ok,
        f"weekday corr {rec.weekday_rank_corr:.3f} (>=0.9), "
        f"promo MAD {rec.promo_mad_ratio:.3f} (<=0.25), "
        f"price sign {rec.price_sign_agreement:.3f} (>=0.9), "
        f"training {synthetic_run['train_minutes']:.1f} min (<30)",
    )


def test_criterion_5_benchmark_ordering(synthetic_run):
    """Median std RMSE: beats seasonal naive by >=20% and Holt-Winters by >=10%."""
    agg = synthetic_run["report"].aggregates
    hnam = agg["hnam"]["std_rmse"]["median"]
    naive = agg["seasonal_naive"]["std_rmse"]["median"]
    hw = agg["holt_winters"]["std_rmse"]["median"]
    ok = (
        hnam <= 0.8 * naive
        and hnam <= 0.9 * hw
        and synthetic_run["total_minutes"] < 45
    )
    report(
        5, "benchmark ordering", ok,
        f"hnam {hnam:.3f} vs naive {naive:.3f} (need <={0.8 * naive:.3f}) "
        f"vs holt-winters {hw:.3f} (need <={0.9 * hw:.3f}); "
        f"total {synthetic_run['total_minutes']:.1f} min (<45)",
    )


def test_criterion_6_selection_fixture():
    """The 10-series fixture yields exactly the 4 clean survivors."""
    t0 = time.perf_counter()
    dataset = build_selection_fixture()
    selected = select_series(dataset, FIXTURE_CRITERIA, FIXTURE_TEST_START)
    elapsed = time.perf_counter() - t0
    ok = selected == sorted(FIXTURE_CLEAN) and elapsed < 1.0
    report(
        6, "selection filters", ok,
        f"{[str(k) for k in selected]} in {elapsed * 1000:.0f}ms (<1s)",
    )


def test_criterion_7_metric_oracles():
    """SMAPE / std metrics match direct formulas to 1e-12 on 1000 vectors."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 30))
        y = rng.uniform(0, 50, size=n)
        yhat = rng.uniform(-10, 50, size=n)
        # independent direct-formula implementations
        denom = np.abs(y) + np.abs(yhat)
        terms = np.where(denom > 0, 2.0 * np.abs(y - yhat) / np.where(denom == 0, 1, denom), 0.0)
        s_oracle = float(terms.mean())
        s = smape(y, yhat)
        worst = max(worst, abs(s - s_oracle))
        assert 0.0 <= s <= 2.0
        std = float(rng.uniform(0.5, 5.0))
        mae, rmse = standardized_errors(y, yhat, std)
        worst = max(worst, abs(mae - np.mean(np.abs(y - yhat)) / std))
        worst = max(worst, abs(rmse - np.sqrt(np.mean((y - yhat) ** 2)) / std))
        # exact scale invariance under power-of-two factors
        for c in (0.5, 2.0, 8.0):
            assert standardized_errors(c * y, c * yhat, c * std) == (mae, rmse)
    elapsed = time.perf_counter() - t0
    report(
        7, "metric oracles", worst <= 1e-12 and elapsed < 1.0,
        f"worst |diff| {worst:.2e} (<=1e-12); {elapsed * 1000:.0f}ms (<1s)",
    )


def test_criterion_8_holt_winters():
    """Noiseless seasonal fixture: SSE < 1e-6; 14-step within 1e-3 of truth."""
    t0 = time.perf_counter()
    season = np.array([4.0, -2.0, 1.0, 0.0, -1.0, 3.0, -5.0])
    n = 126
    y = 10.0 + season[np.arange(n) % 7]
    params = holt_winters_fit(y, 7)
    fc = holt_winters_forecast(params, 14)
    expected = 10.0 + season[np.arange(n, n + 14) % 7]
    max_err = float(np.max(np.abs(fc - expected)))
    # invariant: returned SSE beats every grid start
    l0, b0, s0 = _initial_states(y, 7)
    aa, bb, gg = np.meshgrid(_GRID, _GRID, _GRID, indexing="ij")
    grid_min = float(
        _run_grid(y, aa.ravel(), bb.ravel(), gg.ravel(), 7, l0, b0, s0).min()
    )
    elapsed = time.perf_counter() - t0
    ok = params.sse < 1e-6 and max_err < 1e-3 and params.sse <= grid_min + 1e-12 and elapsed < 10
    report(
        8, "holt-winters fixture", ok,
        f"SSE {params.sse:.2e} (<1e-6), forecast err {max_err:.2e} (<1e-3); "
        f"{elapsed:.1f}s (<10s)",
    )


def test_criterion_9_early_stopping():
    """Contrived loss sequences: exact argmin snapshot and stop epoch."""
    t0 = time.perf_counter()
    cases = [
        # (sequence, patience, expected_best_epoch, expected_stop_epoch)
        ([1.0, 2.0, 3.0], 1, 1, 2),
        ([5.0, 4.0, 3.0, 3.5, 3.6, 3.7], 3, 3, 6),
        ([2.0, 1.0, 1.5, 0.5, 0.9, 1.1, 1.2], 3, 4, 7),
        ([3.0, 3.0, 3.0, 3.0, 3.0], 2, 1, 3),
        ([9.0, 8.0, 7.0, 6.0], 10, 4, None),  # never stops within budget
    ]
    ok = True
    detail = []
    for seq, patience, want_best, want_stop in cases:
        stopper = EarlyStopper(patience)
        stop_epoch = None
        for epoch, value in enumerate(seq, start=1):
            if stopper.update(epoch, value):
                stop_epoch = epoch
                break
        if stopper.best_epoch != want_best or stop_epoch != want_stop:
            ok = False
            detail.append(f"{seq}: best {stopper.best_epoch} stop {stop_epoch}")
    elapsed = time.perf_counter() - t0
    report(
        9, "early stopping contract", ok and elapsed < 1.0,
        "; ".join(detail) if detail else f"{len(cases)} sequences exact",
    )


def test_criterion_10_service_soundness(tmp_path):
    """Empty what-if byte-identical; 100 scenarios respect masking; replay exact."""
    from test_service import service_fixture

    from hnam.model import ComposedForecast
    from hnam.service import AdjustmentLog, ForecastService

    t0 = time.perf_counter()
    _, panel, keys, model = service_fixture(n_days=150, seed=4)
    service = ForecastService(
        model, panel, keys, adjustment_log=tmp_path / "adj.jsonl",
        snapshot_hash="acceptance",
    )
    origin = "2024-03-01"
    base = service.forecast("P0/S0", origin)

    # (a) empty overrides byte-identical
    empty = service.whatif({"series": "P0/S0", "origin": origin, "overrides": []})
    same = all(
        json.dumps(empty[f]) == json.dumps(base[f])
        for f in ("level", "effects", "coefficients", "prediction", "truncated_prediction")
    )

    # (b) 100 randomized override scenarios never change lower-ranked effects
    rng = np.random.default_rng(10)
    hierarchy = service.meta()["hierarchy"]
    masking_ok = True
    for _ in range(100):
        series = f"P{int(rng.integers(0, 2))}/S0"
        origin_day = (np.datetime64("2024-02-01") + np.timedelta64(int(rng.integers(0, 40)), "D"))
        ref = service.forecast(series, str(origin_day))
        rank = int(rng.integers(0, len(hierarchy)))
        name = hierarchy[rank]
        spec = model.config.causal[rank]
        value = (
            float(rng.integers(0, spec.cardinality))
            if spec.is_categorical
            else float(rng.normal() * 0.05)
        )
        out = service.whatif(
            {
                "series": series,
                "origin": str(origin_day),
                "overrides": [
                    {"covariate": name, "step": int(rng.integers(0, 7)), "value": value}
                ],
            }
        )
        for lower in hierarchy[:rank]:
            if out["effects"][lower] != ref["effects"][lower]:
                masking_ok = False
        if out["level"] != ref["level"]:
            masking_ok = False

    # (c) adjustment-log replay reproduces the final state exactly
    rng2 = np.random.default_rng(11)
    final = None
    for k in range(5):
        target = ["level", "weekday", "promotion"][k % 3]
        mode = "add" if k % 2 == 0 else "multiply"
        values = (
            list(rng2.normal(0, 2, size=7))
            if mode == "add"
            else list(rng2.uniform(0.5, 1.5, size=7))
        )
        final = service.adjust(
            {
                "forecast_id": base["id"],
                "series": "P0/S0",
                "origin": origin,
                "adjustment": {"target": target, "mode": mode, "values": values},
            }
        )
    replayed = AdjustmentLog(service.log.path).replay(
        base["id"], ComposedForecast.from_dict(base)
    )
    replay_ok = np.array_equal(replayed.prediction, np.array(final["prediction"]))

    elapsed = time.perf_counter() - t0
    ok = same and masking_ok and replay_ok and elapsed < 60
    report(
        10, "service soundness", ok,
        f"byte-identical={same}, masking 100/100={masking_ok}, "
        f"replay exact={replay_ok}; {elapsed:.1f}s (<60s)",
    )
