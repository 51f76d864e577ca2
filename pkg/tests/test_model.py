"""Architecture contracts: masking, recomposition, batched equivalence."""

import numpy as np
import pytest

from helpers import random_batch, random_bundle, small_config

from hnam.errors import DataError, FitError
from hnam.model import (
    Batch,
    ComposedForecast,
    ContinuousStats,
    CovariateSpec,
    HnamModel,
    compose_forecasts,
    transform_values,
)
from hnam.tensor import Tensor


class TestTransform:
    def test_categorical_reference_category(self):
        spec = CovariateSpec("promo", "causal", cardinality=3)
        out = transform_values(spec, np.array([0.0]), ContinuousStats())
        assert np.array_equal(out, [[0.0, 0.0]])

    def test_categorical_unit_position(self):
        spec = CovariateSpec("promo", "causal", cardinality=3)
        out = transform_values(spec, np.array([2.0]), ContinuousStats())
        assert np.array_equal(out, [[0.0, 1.0]])

    def test_continuous_standardization(self):
        spec = CovariateSpec("price", "causal")
        stats = ContinuousStats({"price": (10.0, 2.0)})
        out = transform_values(spec, np.array([14.0]), stats)
        assert np.allclose(out, [[2.0]])

    def test_zero_std_fit_error_names_covariate(self):
        with pytest.raises(FitError, match="price"):
            ContinuousStats.fit(
                {"price": np.ones(10)}, require_variation=("price",)
            )

    def test_out_of_range_code(self):
        spec = CovariateSpec("promo", "causal", cardinality=2)
        with pytest.raises(DataError, match="promo"):
            transform_values(spec, np.array([5.0]), ContinuousStats())


class TestAssembly:
    def test_static_stream_constant_over_time(self):
        config = small_config(n_causal=1)
        model = HnamModel(config, root_seed=1)
        batch = random_batch(config, np.random.default_rng(0), size=1)
        streams = model.embed_and_assemble(batch)
        first = streams.static.data[:, :1, :]
        assert np.allclose(streams.static.data, first)

    def test_zero_embeddings_give_zero_streams(self):
        config = small_config(n_causal=1)
        model = HnamModel(config, root_seed=1)
        for p in model.parameters():
            if p.name.startswith("embed."):
                p.data = np.zeros_like(p.data)
        batch = random_batch(config, np.random.default_rng(0), size=1)
        streams = model.embed_and_assemble(batch)
        assert np.allclose(streams.past.data, 0.0)
        assert np.allclose(streams.causal[0].data, 0.0)

    def test_past_perturbation_reaches_assembled_history(self):
        config = small_config(n_causal=1)
        model = HnamModel(config, root_seed=1)
        rng = np.random.default_rng(3)
        bundle = random_bundle(config, rng)
        base = model.embed_and_assemble(Batch.from_bundles([bundle]))
        t_hit = 2
        bundle.P[0, t_hit] += 1.5
        bumped = model.embed_and_assemble(Batch.from_bundles([bundle]))
        diff = np.abs(bumped.past.data - base.past.data).sum(axis=-1)[0]
        assert diff[t_hit] > 0
        others = np.delete(diff, t_hit)
        assert np.allclose(others, 0.0)


class TestLevel:
    def test_zero_head_gives_constant_bias_level(self):
        config = small_config(n_causal=2)
        model = HnamModel(config, root_seed=2)
        model.level_head.w.data = np.zeros_like(model.level_head.w.data)
        model.level_head.b.data = np.array([3.25])
        batch = random_batch(config, np.random.default_rng(1), size=2)
        level, _ = model.level_forward(model.embed_and_assemble(batch))
        assert np.allclose(level.data, 3.25)

    def test_level_ignores_causal_and_future_past(self):
        config = small_config(n_causal=2)
        model = HnamModel(config, root_seed=2)
        rng = np.random.default_rng(2)
        bundle = random_bundle(config, rng)
        base_streams = model.embed_and_assemble(Batch.from_bundles([bundle]))
        base_level, base_emb = model.level_forward(base_streams)

        bundle.C = np.where(
            bundle.C > 0, 0.0, bundle.C + 1.0
        )  # arbitrary but in-range rewrite of every causal value
        streams = model.embed_and_assemble(Batch.from_bundles([bundle]))
        level, emb = model.level_forward(streams)
        assert np.array_equal(level.data, base_level.data)
        assert np.array_equal(emb.data, base_emb.data)


class TestHierarchyMasking:
    def test_perturbing_higher_covariate_is_invisible(self):
        # the central architectural contract, bit-exact
        config = small_config(n_causal=3)
        model = HnamModel(config, root_seed=5)
        rng = np.random.default_rng(7)
        bundle = random_bundle(config, rng)
        batch = Batch.from_bundles([bundle])
        streams = model.embed_and_assemble(batch)
        _, emb = model.level_forward(streams)
        base = [
            model.coefficient_forward(i, streams, emb).data
            for i in range(3)
        ]
        for j in range(1, 3):
            mutated = random_bundle(config, rng)
            # copy everything except causal row j
            mutated.S, mutated.T, mutated.P = bundle.S, bundle.T, bundle.P
            mutated.C = bundle.C.copy()
            spec = config.causal[j]
            if spec.is_categorical:
                mutated.C[j] = (bundle.C[j] + 1) % spec.cardinality
            else:
                mutated.C[j] = bundle.C[j] + rng.normal(size=bundle.C[j].shape)
            mstreams = model.embed_and_assemble(Batch.from_bundles([mutated]))
            _, memb = model.level_forward(mstreams)
            assert np.array_equal(memb.data, emb.data)
            for i in range(j):
                out = model.coefficient_forward(i, mstreams, memb).data
                assert np.array_equal(out, base[i]), (i, j)

    def test_lower_covariate_perturbation_changes_output(self):
        config = small_config(n_causal=2)
        model = HnamModel(config, root_seed=6)
        rng = np.random.default_rng(8)
        bundle = random_bundle(config, rng)
        streams = model.embed_and_assemble(Batch.from_bundles([bundle]))
        _, emb = model.level_forward(streams)
        base = model.coefficient_forward(1, streams, emb).data
        mutated = random_bundle(config, rng)
        mutated.S, mutated.T, mutated.P = bundle.S, bundle.T, bundle.P
        mutated.C = bundle.C.copy()
        mutated.C[0, 0] = (bundle.C[0, 0] + 1) % config.causal[0].cardinality
        mstreams = model.embed_and_assemble(Batch.from_bundles([mutated]))
        _, memb = model.level_forward(mstreams)
        out = model.coefficient_forward(1, mstreams, memb).data
        assert not np.array_equal(out, base)

    def test_coefficient_shape_contract(self):
        config = small_config(n_causal=2)
        model = HnamModel(config, root_seed=4)
        batch = random_batch(config, np.random.default_rng(4), size=3)
        streams = model.embed_and_assemble(batch)
        _, emb = model.level_forward(streams)
        out0 = model.coefficient_forward(0, streams, emb)
        out1 = model.coefficient_forward(1, streams, emb)
        assert out0.shape == (3, config.horizon, 6)  # weekday: k=7 -> 6
        assert out1.shape == (3, config.horizon, 1)  # continuous price


class TestComposition:
    def test_all_reference_values_collapse_to_level(self):
        config = small_config(n_causal=2)
        model = HnamModel(config, root_seed=9)
        rng = np.random.default_rng(9)
        bundle = random_bundle(config, rng)
        bundle.C[0, :] = 0.0  # weekday at reference
        # continuous at its mean -> standardized zero
        bundle.C[1, :] = 0.0
        model.cont_stats.stats["relative_price"] = (0.0, 1.0)
        result = model.forward_bundle(bundle)
        assert np.array_equal(result.prediction.data, result.level.data)
        for eff in result.effects:
            assert np.array_equal(eff.data, 0.0 * eff.data)

    def test_single_active_step_changes_only_that_step(self):
        config = small_config(n_causal=1)
        model = HnamModel(config, root_seed=10)
        rng = np.random.default_rng(10)
        bundle = random_bundle(config, rng)
        bundle.C[0, :] = 0.0
        bundle.C[0, config.history_length + 1] = 2.0  # one active future step
        result = model.forward_bundle(bundle)
        diff = result.prediction.data - result.level.data
        assert diff[0, 1] != 0.0
        assert np.array_equal(np.delete(diff[0], 1), np.zeros(config.horizon - 1))

    def test_recomposition_tolerance(self):
        rng = np.random.default_rng(11)
        for trial in range(25):
            config = small_config(n_causal=1 + trial % 3)
            model = HnamModel(config, root_seed=100 + trial)
            batch = random_batch(config, rng, size=2)
            forecasts = compose_forecasts(
                batch, model.forward(batch), [c.name for c in config.causal]
            )
            for fc in forecasts:
                resum = fc.level + fc.effects.sum(axis=0)
                err = np.abs(fc.prediction - resum)
                assert np.all(err <= 1e-9 * (1.0 + np.abs(fc.prediction)))
                assert np.array_equal(
                    fc.truncated_prediction, np.maximum(fc.prediction, 0.0)
                )

    def test_composed_forecast_roundtrip(self):
        config = small_config(n_causal=2)
        model = HnamModel(config, root_seed=12)
        batch = random_batch(config, np.random.default_rng(12), size=1)
        fc = compose_forecasts(
            batch, model.forward(batch), [c.name for c in config.causal]
        )[0]
        rt = ComposedForecast.from_dict(fc.to_dict())
        assert np.allclose(rt.prediction, fc.prediction)
        assert np.allclose(rt.effects, fc.effects)


class TestBatchedEquivalence:
    def test_batched_equals_sequential_exactly(self):
        for n_c in (1, 3):
            config = small_config(n_causal=n_c)
            model = HnamModel(config, root_seed=20 + n_c)
            batch = random_batch(config, np.random.default_rng(20 + n_c), size=3)
            streams = model.embed_and_assemble(batch)
            _, emb = model.level_forward(streams)
            batched = model.batched_coefficient_forward(streams, emb)
            for i in range(n_c):
                seq = model.coefficient_forward(i, streams, emb)
                assert np.array_equal(batched[i].data, seq.data), i

    def test_batched_gradients_match_sequential(self):
        config = small_config(n_causal=2)
        rng = np.random.default_rng(23)
        batch = random_batch(config, rng, size=2)
        probes = [
            rng.normal(size=(2, config.horizon, spec.effect_width))
            for spec in config.causal
        ]

        def run(batched: bool):
            model = HnamModel(config, root_seed=23)
            streams = model.embed_and_assemble(batch)
            _, emb = model.level_forward(streams)
            if batched:
                outs = model.batched_coefficient_forward(streams, emb)
            else:
                outs = [
                    model.coefficient_forward(i, streams, emb) for i in range(2)
                ]
            loss = None
            for out, probe in zip(outs, probes):
                term = (out * Tensor(probe)).sum()
                loss = term if loss is None else loss + term
            loss.backward()
            return {p.name: p.grad.copy() for p in model.parameters() if p.grad is not None}

        g_seq = run(False)
        g_bat = run(True)
        assert set(g_seq) == set(g_bat)
        for name in g_seq:
            denom = np.maximum(1e-12, np.abs(g_seq[name]))
            assert np.max(np.abs(g_seq[name] - g_bat[name]) / denom) < 1e-10, name


class TestSnapshotRoundtrip:
    def test_save_load_identical_forward(self, tmp_path):
        config = small_config(n_causal=2)
        model = HnamModel(config, root_seed=31)
        model.cont_stats.stats["relative_price"] = (0.5, 2.0)
        batch = random_batch(config, np.random.default_rng(31), size=2)
        before = model.forward(batch).prediction.data
        path = tmp_path / "model.hnam"
        model.save(path)
        loaded = HnamModel.load(path)
        after = loaded.forward(batch).prediction.data
        assert np.array_equal(before, after)
        assert loaded.cont_stats.stats["relative_price"] == (0.5, 2.0)
