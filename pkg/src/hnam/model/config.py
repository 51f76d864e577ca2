"""Covariate declarations and architecture configuration."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError

KINDS = ("causal", "non_causal", "static", "past")


@dataclass
class CovariateSpec:
    """One input feature: its temporal role and value type.

    cardinality None means continuous; otherwise the feature is categorical
    with codes 0..cardinality-1 and code 0 is the reference category.
    Causal covariates carry a hierarchy_rank (0 = lowest, estimated first).
    """

    name: str
    kind: str
    cardinality: int | None = None
    hierarchy_rank: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"covariate {self.name!r}: unknown kind {self.kind!r}")
        if self.cardinality is not None and self.cardinality < 2:
            raise ConfigError(
                f"covariate {self.name!r}: categorical cardinality must be >= 2, "
                f"got {self.cardinality}"
            )
        if self.kind != "causal" and self.hierarchy_rank is not None:
            raise ConfigError(
                f"covariate {self.name!r}: hierarchy_rank only applies to causal"
            )

    @property
    def is_categorical(self) -> bool:
        return self.cardinality is not None

    @property
    def effect_width(self) -> int:
        """Coefficient head width: 1 for continuous, k-1 for categorical."""
        if not self.is_categorical:
            return 1
        return self.cardinality - 1

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "cardinality": self.cardinality,
            "hierarchy_rank": self.hierarchy_rank,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CovariateSpec":
        return cls(
            name=d["name"],
            kind=d["kind"],
            cardinality=d.get("cardinality"),
            hierarchy_rank=d.get("hierarchy_rank"),
        )


@dataclass
class HnamConfig:
    """Architecture hyperparameters plus the covariate layout.

    `hierarchy` lists causal covariate names from lowest to highest rank;
    ranks on the specs are filled in from it at validation time.
    """

    covariates: list[CovariateSpec] = field(default_factory=list)
    hierarchy: list[str] = field(default_factory=list)
    embedding_size: int = 32
    n_heads: int = 4
    mlp_expansion: int = 4
    conv_expansion: int = 2
    dropout: float = 0.1
    history_length: int = 35
    horizon: int = 14

    def __post_init__(self):
        if self.embedding_size % self.n_heads != 0:
            raise ConfigError(
                f"embedding_size {self.embedding_size} not divisible by "
                f"n_heads {self.n_heads}"
            )
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if self.history_length < 3:
            raise ConfigError("history_length must be >= 3 (conv kernel support)")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        names = [c.name for c in self.covariates]
        if len(set(names)) != len(names):
            raise ConfigError("covariate names must be unique")
        causal = {c.name: c for c in self.covariates if c.kind == "causal"}
        if not self.hierarchy:
            ranked = sorted(causal.values(), key=lambda c: c.hierarchy_rank or 0)
            self.hierarchy = [c.name for c in ranked]
        if set(self.hierarchy) != set(causal):
            raise ConfigError(
                f"hierarchy {self.hierarchy} does not match causal covariates "
                f"{sorted(causal)}"
            )
        for rank, name in enumerate(self.hierarchy):
            causal[name].hierarchy_rank = rank

    # -- convenience views -------------------------------------------------

    def by_kind(self, kind: str) -> list[CovariateSpec]:
        if kind == "causal":
            lookup = {c.name: c for c in self.covariates}
            return [lookup[n] for n in self.hierarchy]
        return [c for c in self.covariates if c.kind == kind]

    @property
    def causal(self) -> list[CovariateSpec]:
        return self.by_kind("causal")

    @property
    def n_causal(self) -> int:
        return len(self.hierarchy)

    @property
    def total_steps(self) -> int:
        return self.history_length + self.horizon

    def continuous_names(self) -> list[str]:
        return [c.name for c in self.covariates if not c.is_categorical]

    def to_dict(self) -> dict:
        return {
            "covariates": [c.to_dict() for c in self.covariates],
            "hierarchy": list(self.hierarchy),
            "embedding_size": self.embedding_size,
            "n_heads": self.n_heads,
            "mlp_expansion": self.mlp_expansion,
            "conv_expansion": self.conv_expansion,
            "dropout": self.dropout,
            "history_length": self.history_length,
            "horizon": self.horizon,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HnamConfig":
        return cls(
            covariates=[CovariateSpec.from_dict(c) for c in d["covariates"]],
            hierarchy=list(d["hierarchy"]),
            embedding_size=d["embedding_size"],
            n_heads=d["n_heads"],
            mlp_expansion=d["mlp_expansion"],
            conv_expansion=d.get("conv_expansion", 2),
            dropout=d["dropout"],
            history_length=d["history_length"],
            horizon=d["horizon"],
        )
