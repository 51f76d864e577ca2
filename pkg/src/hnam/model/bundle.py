"""Covariate bundles: the aligned input matrices for one forecasting sample."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError
from .config import HnamConfig


@dataclass
class CovariateBundle:
    """Aligned matrices for one sample over T_h + T_f steps.

    S: static rows (constant over time), T: non-causal rows, P: past rows
    (columns at and after T_h are zero and never read), C: causal rows in
    hierarchy order. Categorical rows hold integer codes stored as floats.
    y_scale is the per-sample target scale (1 + mean of the raw sales
    history window); the P sales row and targets are divided by it.
    """

    S: np.ndarray
    T: np.ndarray
    P: np.ndarray
    C: np.ndarray
    T_h: int
    T_f: int
    y_scale: float = 1.0

    def validate(self, config: HnamConfig | None = None) -> None:
        total = self.T_h + self.T_f
        for name, mat in (("S", self.S), ("T", self.T), ("P", self.P), ("C", self.C)):
            if mat.ndim != 2 or mat.shape[1] != total:
                raise DataError(
                    f"bundle matrix {name} must be [rows, {total}], got {mat.shape}"
                )
        if self.P.shape[0] and np.any(self.P[:, self.T_h :] != 0.0):
            raise DataError("P has nonzero future columns")
        if self.S.shape[0] and np.any(self.S != self.S[:, :1]):
            raise DataError("S rows must be constant over time")
        if config is not None:
            expected = {
                "S": len(config.by_kind("static")),
                "T": len(config.by_kind("non_causal")),
                "P": len(config.by_kind("past")),
                "C": config.n_causal,
            }
            for name, rows in expected.items():
                if getattr(self, name).shape[0] != rows:
                    raise DataError(
                        f"bundle matrix {name} has {getattr(self, name).shape[0]} "
                        f"rows, config declares {rows}"
                    )


@dataclass
class Batch:
    """Stacked bundles plus training targets.

    target/target_mask cover the horizon; masked-out steps carry zero
    target and do not enter the loss (used for truncated validation
    windows near the test boundary).
    """

    S: np.ndarray  # [B, n_static, T]
    T: np.ndarray  # [B, n_temporal, T]
    P: np.ndarray  # [B, n_past, T]
    C: np.ndarray  # [B, n_causal, T]
    T_h: int
    T_f: int
    y_scale: np.ndarray  # [B]
    target: np.ndarray | None = None  # [B, T_f], raw scale
    target_mask: np.ndarray | None = None  # [B, T_f] float 0/1

    @property
    def size(self) -> int:
        return self.S.shape[0]

    @classmethod
    def from_bundles(
        cls,
        bundles: list[CovariateBundle],
        targets: list[np.ndarray] | None = None,
        masks: list[np.ndarray] | None = None,
    ) -> "Batch":
        if not bundles:
            raise DataError("cannot build a batch from zero bundles")
        first = bundles[0]
        batch = cls(
            S=np.stack([b.S for b in bundles]),
            T=np.stack([b.T for b in bundles]),
            P=np.stack([b.P for b in bundles]),
            C=np.stack([b.C for b in bundles]),
            T_h=first.T_h,
            T_f=first.T_f,
            y_scale=np.array([b.y_scale for b in bundles], dtype=np.float64),
        )
        if targets is not None:
            batch.target = np.stack(targets).astype(np.float64)
            if masks is not None:
                batch.target_mask = np.stack(masks).astype(np.float64)
            else:
                batch.target_mask = np.ones_like(batch.target)
        return batch

    def subset(self, idx: np.ndarray) -> "Batch":
        return Batch(
            S=self.S[idx],
            T=self.T[idx],
            P=self.P[idx],
            C=self.C[idx],
            T_h=self.T_h,
            T_f=self.T_f,
            y_scale=self.y_scale[idx],
            target=None if self.target is None else self.target[idx],
            target_mask=None if self.target_mask is None else self.target_mask[idx],
        )

    def bundle(self, i: int) -> CovariateBundle:
        return CovariateBundle(
            S=self.S[i],
            T=self.T[i],
            P=self.P[i],
            C=self.C[i],
            T_h=self.T_h,
            T_f=self.T_f,
            y_scale=float(self.y_scale[i]),
        )
