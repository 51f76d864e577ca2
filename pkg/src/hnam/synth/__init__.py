"""Synthetic ground-truth generator and recovery scoring."""

from .generator import (
    GroundTruth,
    SeriesTruth,
    SyntheticSpec,
    default_schema_dict,
    generate,
    write_sales_csv,
    write_truth_csv,
)
from .recovery import (
    RecoveryReport,
    SeriesRecovery,
    collect_day_effects,
    rank_correlation,
    records_from_truth,
    score_recovery,
)

__all__ = [
    "GroundTruth",
    "SeriesTruth",
    "SyntheticSpec",
    "default_schema_dict",
    "generate",
    "write_sales_csv",
    "write_truth_csv",
    "RecoveryReport",
    "SeriesRecovery",
    "collect_day_effects",
    "rank_correlation",
    "records_from_truth",
    "score_recovery",
]
