"""Global-model training with validation-based early stopping."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..data.windows import WindowSample, batch_from_samples
from ..errors import DataError, DivergenceError
from ..model import Batch, HnamModel
from ..model.config import CovariateSpec
from ..tensor import AdamW, Tensor
from ..tensor.memory import configure_allocator
from ..tensor.rng import stream

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    lr: float = 0.001
    weight_decay: float = 0.01
    batch_size: int = 256
    max_epochs_initial: int = 300
    max_epochs_finetune: int = 100
    patience: int = 30
    seed: int = 0
    grad_clip: float = 10.0

    def __post_init__(self):
        if self.batch_size < 1:
            raise DataError("batch_size must be >= 1")
        if self.patience >= max(self.max_epochs_initial, 1):
            logger.warning(
                "patience %d >= max epochs %d: early stopping cannot trigger",
                self.patience,
                self.max_epochs_initial,
            )

    def to_dict(self) -> dict:
        return {
            "lr": self.lr,
            "weight_decay": self.weight_decay,
            "batch_size": self.batch_size,
            "max_epochs_initial": self.max_epochs_initial,
            "max_epochs_finetune": self.max_epochs_finetune,
            "patience": self.patience,
            "seed": self.seed,
            "grad_clip": self.grad_clip,
        }


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    seconds: float


@dataclass
class TrainLog:
    epochs: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = float("inf")
    stop_reason: str = ""

    def to_dict(self) -> dict:
        return {
            "epochs": [
                {
                    "epoch": e.epoch,
                    "train_loss": e.train_loss,
                    "val_loss": e.val_loss,
                    "seconds": e.seconds,
                }
                for e in self.epochs
            ],
            "best_epoch": self.best_epoch,
            "best_val_loss": self.best_val_loss,
            "stop_reason": self.stop_reason,
        }


class EarlyStopper:
    """Argmin tracker: stop after `patience` epochs without improvement.

    Ties keep the earliest best epoch.
    """

    def __init__(self, patience: int):
        self.patience = patience
        self.best = float("inf")
        self.best_epoch: int = -1
        self.since_best = 0

    def update(self, epoch: int, value: float) -> bool:
        if value < self.best:
            self.best = value
            self.best_epoch = epoch
            self.since_best = 0
        else:
            self.since_best += 1
        return self.since_best >= self.patience


def compute_loss(prediction: Tensor, batch: Batch) -> Tensor:
    """Mean squared error in the per-sample scaled space.

    Untruncated predictions enter the loss; truncation happens only at
    evaluation and serving time. Masked-out horizon steps are excluded.
    """
    scaled_target = batch.target / batch.y_scale[:, None]
    mask = batch.target_mask if batch.target_mask is not None else np.ones_like(scaled_target)
    diff = prediction - Tensor(scaled_target)
    sq = diff * diff * Tensor(mask)
    denom = float(mask.sum())
    if denom == 0:
        raise DataError("loss over a fully masked batch")
    return sq.sum() * (1.0 / denom)


def validation_loss(model: HnamModel, batches: list[Batch]) -> float:
    """Scaled-space MSE pooled over all masked cells of all batches."""
    num = 0.0
    den = 0.0
    for batch in batches:
        result = model.forward(batch, training=False)
        scaled_target = batch.target / batch.y_scale[:, None]
        mask = batch.target_mask
        diff = (result.prediction.data - scaled_target) * mask
        num += float((diff * diff).sum())
        den += float(mask.sum())
    if den == 0:
        raise DataError("validation set is fully masked")
    return num / den


def _batches(full: Batch, order: np.ndarray, batch_size: int) -> list[np.ndarray]:
    return [order[i : i + batch_size] for i in range(0, len(order), batch_size)]


def _check_covariates(model: HnamModel, covariates: list[CovariateSpec] | None):
    if covariates is None:
        return
    have = {c.name for c in model.config.covariates}
    want = {c.name for c in covariates}
    if have != want:
        raise DataError(
            "snapshot covariates do not match samples: "
            f"only in snapshot {sorted(have - want)}, "
            f"only in data {sorted(want - have)}"
        )


def train(
    model: HnamModel,
    train_samples: list[WindowSample],
    val_samples: list[WindowSample],
    config: TrainConfig,
    max_epochs: int | None = None,
    include_initial: bool = False,
) -> tuple[HnamModel, TrainLog]:
    """Mini-batch training; returns the best-validation snapshot, never the last.

    With include_initial, the incoming parameters are evaluated as epoch 0
    and participate in best-snapshot selection (used by fine-tuning so it
    can only hold or improve).
    """
    if not train_samples or not val_samples:
        raise DataError("train and validation sample sets must be non-empty")
    if max_epochs is None:
        max_epochs = config.max_epochs_initial
    configure_allocator()

    full = batch_from_samples(train_samples)
    val_full = batch_from_samples(val_samples)
    val_batches = [
        val_full.subset(idx)
        for idx in _batches(val_full, np.arange(val_full.size), config.batch_size)
    ]

    opt = AdamW(
        model.parameters(),
        lr=config.lr,
        weight_decay=config.weight_decay,
    )
    stopper = EarlyStopper(config.patience)
    log = TrainLog()
    best_state = None

    if include_initial:
        t0 = time.perf_counter()
        v0 = validation_loss(model, val_batches)
        log.epochs.append(EpochRecord(0, float("nan"), v0, time.perf_counter() - t0))
        stopper.update(0, v0)
        best_state = model.state_dict()
        log.best_epoch, log.best_val_loss = 0, v0

    if max_epochs == 0:
        log.stop_reason = "max epochs reached"
        if best_state is not None:
            model.load_state(best_state)
        return model, log

    n = full.size
    stop_reason = "max epochs reached"
    for epoch in range(1, max_epochs + 1):
        t0 = time.perf_counter()
        order = stream(config.seed, "shuffle", epoch).permutation(n)
        epoch_num = 0.0
        epoch_den = 0.0
        for b_idx, chunk in enumerate(_batches(full, order, config.batch_size)):
            batch = full.subset(chunk)
            rng = stream(config.seed, "dropout", epoch, b_idx)
            result = model.forward(batch, training=True, rng=rng)
            loss = compute_loss(result.prediction, batch)
            loss_val = loss.item()
            if not np.isfinite(loss_val):
                raise DivergenceError(
                    f"non-finite training loss at epoch {epoch}, batch {b_idx}"
                )
            opt.zero_grad()
            loss.backward()
            norm = opt.clip_grad_norm(config.grad_clip)
            if norm > config.grad_clip:
                logger.info(
                    "gradient norm %.2f clipped to %.1f (epoch %d batch %d)",
                    norm, config.grad_clip, epoch, b_idx,
                )
            opt.step()
            weight = float(batch.target_mask.sum())
            epoch_num += loss_val * weight
            epoch_den += weight

        val_loss = validation_loss(model, val_batches)
        log.epochs.append(
            EpochRecord(epoch, epoch_num / epoch_den, val_loss, time.perf_counter() - t0)
        )
        if val_loss < log.best_val_loss:
            log.best_val_loss = val_loss
            log.best_epoch = epoch
            best_state = model.state_dict()
        if stopper.update(epoch, val_loss):
            stop_reason = f"no improvement for {config.patience} epochs"
            break

    log.stop_reason = stop_reason
    if best_state is not None:
        model.load_state(best_state)
    return model, log


def finetune(
    model: HnamModel,
    train_samples: list[WindowSample],
    val_samples: list[WindowSample],
    config: TrainConfig,
    covariates: list[CovariateSpec] | None = None,
) -> tuple[HnamModel, TrainLog]:
    """Continue training an existing snapshot on updated data."""
    _check_covariates(model, covariates)
    if train_samples:
        train_samples[0].bundle.validate(model.config)
    return train(
        model,
        train_samples,
        val_samples,
        config,
        max_epochs=config.max_epochs_finetune,
        include_initial=True,
    )
