"""The forecasting network: level plus hierarchically masked coefficients.

Every covariate is embedded to the model dimension. The level network
attends from static+temporal horizon queries onto static+temporal+past
history and projects a scalar level and a level embedding per horizon
step. One coefficient network per causal covariate attends over the same
history enriched with the causal covariates of rank <= its own, so the
information set grows along the user-specified hierarchy and effects of
lower-ranked covariates cannot react to higher-ranked ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DataError
from ..tensor import Parameter, Tensor, check_unique_names, stack, take
from ..tensor.rng import stream
from ..tensor.snapshot import load_snapshot, save_snapshot
from .bundle import Batch, CovariateBundle
from .config import CovariateSpec, HnamConfig
from .layers import AttentionBlock, ContinuousEmbed, Embedding, LayerNormLayer, Linear
from .transform import ContinuousStats, transform_values


@dataclass
class Streams:
    """Embedded per-group streams over the full window, [B, T, d] each."""

    static: Tensor
    temporal: Tensor
    past: Tensor
    causal: list[Tensor]  # one per causal covariate, hierarchy order


@dataclass
class ForwardResult:
    """Scaled-space outputs of one batched forward pass."""

    level: Tensor  # [B, T_f]
    level_emb: Tensor  # [B, T_f, d]
    coefficients: list[Tensor]  # per causal covariate, [B, T_f, w_i]
    values: list[np.ndarray]  # transformed multiplicands, [B, T_f, w_i]
    effects: list[Tensor]  # per causal covariate, [B, T_f]
    prediction: Tensor  # [B, T_f]


class HnamModel:
    """All learnable state plus the forward passes."""

    def __init__(
        self,
        config: HnamConfig,
        root_seed: int = 0,
        cont_stats: ContinuousStats | None = None,
    ):
        self.config = config
        self.root_seed = int(root_seed)
        self.cont_stats = cont_stats or ContinuousStats(
            {n: (0.0, 1.0) for n in config.continuous_names()}
        )
        rng = stream(self.root_seed, "init")
        d = config.embedding_size

        self.embeds: dict[str, Embedding | ContinuousEmbed] = {}
        for spec in config.covariates:
            key = f"embed.{spec.name}"
            if spec.is_categorical:
                self.embeds[spec.name] = Embedding(rng, key, spec.cardinality, d)
            else:
                self.embeds[spec.name] = ContinuousEmbed(rng, key, d)

        self.level_ln_q = LayerNormLayer("level.ln_q", d)
        self.level_ln_kv = LayerNormLayer("level.ln_kv", d)
        self.level_attn = AttentionBlock(
            rng, "level.attn", d, config.n_heads, config.mlp_expansion,
            config.conv_expansion, config.dropout,
        )
        self.level_head = Linear(rng, "level.head", d, 1)
        self.level_emb_head = Linear(rng, "level.emb_head", d, d)

        self.coef_ln_q: list[LayerNormLayer] = []
        self.coef_ln_kv: list[LayerNormLayer] = []
        self.coef_attn: list[AttentionBlock] = []
        self.coef_head: list[Linear] = []
        for i, spec in enumerate(config.causal):
            self.coef_ln_q.append(LayerNormLayer(f"coef.{i}.ln_q", d))
            self.coef_ln_kv.append(LayerNormLayer(f"coef.{i}.ln_kv", d))
            self.coef_attn.append(
                AttentionBlock(
                    rng, f"coef.{i}.attn", d, config.n_heads, config.mlp_expansion,
                    config.conv_expansion, config.dropout,
                )
            )
            self.coef_head.append(Linear(rng, f"coef.{i}.head", d, spec.effect_width))

        check_unique_names(self.parameters())

    # -- parameter bookkeeping ----------------------------------------------

    def parameters(self) -> list[Parameter]:
        params: list[Parameter] = []
        for name in sorted(self.embeds):
            params.extend(self.embeds[name].parameters())
        params.extend(self.level_ln_q.parameters())
        params.extend(self.level_ln_kv.parameters())
        params.extend(self.level_attn.parameters())
        params.extend(self.level_head.parameters())
        params.extend(self.level_emb_head.parameters())
        for i in range(self.config.n_causal):
            params.extend(self.coef_ln_q[i].parameters())
            params.extend(self.coef_ln_kv[i].parameters())
            params.extend(self.coef_attn[i].parameters())
            params.extend(self.coef_head[i].parameters())
        return params

    def state_dict(self) -> dict[str, np.ndarray]:
        return {p.name: p.data.copy() for p in self.parameters()}

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        for p in self.parameters():
            if p.name not in state:
                raise DataError(f"snapshot is missing parameter {p.name!r}")
            if tuple(state[p.name].shape) != p.data.shape:
                raise DataError(
                    f"parameter {p.name!r}: snapshot shape "
                    f"{state[p.name].shape} != model shape {p.data.shape}"
                )
            p.data = state[p.name].copy()

    def clone(self) -> "HnamModel":
        other = HnamModel(self.config, self.root_seed, self.cont_stats)
        other.load_state(self.state_dict())
        return other

    # -- persistence ----------------------------------------------------------

    def save(self, path: str | Path, extra_meta: dict | None = None) -> None:
        meta = {
            "config": self.config.to_dict(),
            "cont_stats": self.cont_stats.to_dict(),
        }
        if extra_meta:
            meta.update(extra_meta)
        save_snapshot(path, self.state_dict(), self.root_seed, meta=meta)

    @classmethod
    def load(cls, path: str | Path) -> "HnamModel":
        tensors, manifest = load_snapshot(path)
        meta = manifest["meta"]
        config = HnamConfig.from_dict(meta["config"])
        model = cls(
            config,
            root_seed=manifest["root_seed"],
            cont_stats=ContinuousStats.from_dict(meta["cont_stats"]),
        )
        model.load_state(tensors)
        return model

    # -- forward passes ---------------------------------------------------------

    def _embed_group(self, specs: list[CovariateSpec], mat: np.ndarray, d: int) -> Tensor:
        """Sum the embedded covariates of one group; mat is [B, rows, T]."""
        batch, _, steps = mat.shape
        if not specs:
            return Tensor(np.zeros((batch, steps, d)))
        total = None
        for row, spec in enumerate(specs):
            raw = mat[:, row, :]
            if spec.is_categorical:
                codes = raw.astype(np.int64)
                if codes.size and (codes.min() < 0 or codes.max() >= spec.cardinality):
                    bad = int(codes.min()) if codes.min() < 0 else int(codes.max())
                    raise DataError(
                        f"covariate {spec.name!r}: category code {bad} outside "
                        f"[0, {spec.cardinality})"
                    )
                emb = self.embeds[spec.name](codes)
            else:
                std = self.cont_stats.standardize(spec.name, raw)
                emb = self.embeds[spec.name](std)
            total = emb if total is None else total + emb
        return total

    def embed_and_assemble(self, batch: Batch) -> Streams:
        """Embed every covariate and sum within each group."""
        d = self.config.embedding_size
        return Streams(
            static=self._embed_group(self.config.by_kind("static"), batch.S, d),
            temporal=self._embed_group(self.config.by_kind("non_causal"), batch.T, d),
            past=self._embed_group(self.config.by_kind("past"), batch.P, d),
            causal=[
                self._embed_group([spec], batch.C[:, i : i + 1, :], d)
                for i, spec in enumerate(self.config.causal)
            ],
        )

    def level_forward(
        self, streams: Streams, training: bool = False, rng=None
    ) -> tuple[Tensor, Tensor]:
        """Level per horizon step plus the level embedding, from history only."""
        t_h = self.config.history_length
        st = streams.static + streams.temporal
        q_in = self.level_ln_q(take(st, (slice(None), slice(t_h, None), slice(None))))
        kv = take(st + streams.past, (slice(None), slice(0, t_h), slice(None)))
        kv_in = self.level_ln_kv(kv)
        y = self.level_attn(q_in, kv_in, training, rng)
        level = self.level_head(y)
        level = level.reshape(level.shape[0], level.shape[1])
        return level, self.level_emb_head(y)

    def _coef_inputs(self, streams: Streams, level_emb: Tensor):
        """Per-rank (q_in, kv_in) pairs with cumulative causal information."""
        t_h = self.config.history_length
        st = streams.static + streams.temporal
        stp = st + streams.past
        pairs = []
        causal_sum = None
        for i in range(self.config.n_causal):
            causal_sum = (
                streams.causal[i] if causal_sum is None else causal_sum + streams.causal[i]
            )
            q_base = take(
                st + causal_sum, (slice(None), slice(t_h, None), slice(None))
            )
            q_in = self.coef_ln_q[i](q_base) + level_emb
            kv_base = take(
                stp + causal_sum, (slice(None), slice(0, t_h), slice(None))
            )
            kv_in = self.coef_ln_kv[i](kv_base)
            pairs.append((q_in, kv_in))
        return pairs

    def _coef_attention(self, i: int, pair, training: bool, rng) -> Tensor:
        q_in, kv_in = pair
        y = self.coef_attn[i](q_in, kv_in, training, rng)
        return self.coef_head[i](y)

    def coefficient_forward(
        self,
        i: int,
        streams: Streams,
        level_emb: Tensor,
        training: bool = False,
        rng=None,
    ) -> Tensor:
        """Coefficients [B, T_f, w_i] for causal covariate of rank i."""
        if not 0 <= i < self.config.n_causal:
            raise ConfigError(f"causal index {i} out of range")
        pair = self._coef_inputs(streams, level_emb)[i]
        return self._coef_attention(i, pair, training, rng)

    def batched_coefficient_forward(
        self,
        streams: Streams,
        level_emb: Tensor,
        training: bool = False,
        rng=None,
    ) -> list[Tensor]:
        """All coefficient networks in one stacked pass.

        Parameters stay per-network; only the execution is stacked along a
        leading covariate axis. Output heads have per-covariate widths and
        run per network.
        """
        n = self.config.n_causal
        if n == 0:
            return []
        pairs = self._coef_inputs(streams, level_emb)
        q_in = stack([p[0] for p in pairs])  # [n, B, T_f, d]
        kv_in = stack([p[1] for p in pairs])  # [n, B, T_h, d]
        y = AttentionBlock.stacked(self.coef_attn, q_in, kv_in, training, rng)
        outs = []
        for i in range(n):
            outs.append(self.coef_head[i](take(y, i)))
        return outs

    def transform_t(self, c_future: np.ndarray) -> list[np.ndarray]:
        """Raw causal future values [B, n_c, T_f] -> per-rank [B, T_f, w_i]."""
        return [
            transform_values(spec, c_future[:, i, :], self.cont_stats)
            for i, spec in enumerate(self.config.causal)
        ]

    def forward(
        self,
        batch: Batch,
        training: bool = False,
        rng=None,
        batched_coefficients: bool = True,
    ) -> ForwardResult:
        """Full composed forward in scaled target space."""
        t_h = self.config.history_length
        streams = self.embed_and_assemble(batch)
        level, level_emb = self.level_forward(streams, training, rng)
        if batched_coefficients:
            coefs = self.batched_coefficient_forward(streams, level_emb, training, rng)
        else:
            pairs = self._coef_inputs(streams, level_emb)
            coefs = [
                self._coef_attention(i, pairs[i], training, rng)
                for i in range(self.config.n_causal)
            ]
        values = self.transform_t(batch.C[:, :, t_h:])
        effects = [
            (coefs[i] * Tensor(values[i])).sum(axis=-1)
            for i in range(self.config.n_causal)
        ]
        prediction = level
        for eff in effects:
            prediction = prediction + eff
        return ForwardResult(
            level=level,
            level_emb=level_emb,
            coefficients=coefs,
            values=values,
            effects=effects,
            prediction=prediction,
        )

    def forward_bundle(self, bundle: CovariateBundle, **kwargs) -> ForwardResult:
        bundle.validate(self.config)
        return self.forward(Batch.from_bundles([bundle]), **kwargs)
