"""Training engine: loop, early stopping, fine-tuning."""

from .loop import (
    EarlyStopper,
    EpochRecord,
    TrainConfig,
    TrainLog,
    compute_loss,
    finetune,
    train,
    validation_loss,
)

__all__ = [
    "EarlyStopper",
    "EpochRecord",
    "TrainConfig",
    "TrainLog",
    "compute_loss",
    "finetune",
    "train",
    "validation_loss",
]
