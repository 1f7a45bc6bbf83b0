"""Anomaly-aware text scoring, benchmark metrics and dataset synthesis."""

from ._core import (
    ContractError,
    DatasetEmptyError,
    Error,
    IoError,
    ParseError,
    PlacementError,
    RewardService,
    SchemaError,
    __version__,
    anomaly_counts,
    composite_reward,
    default_engine_config,
    evaluate_dataset,
    levenshtein,
    ned,
    normalize_marked,
    ocr_baseline_reward,
    structural_score,
    synthesize_dataset,
    tsap_match,
)

__all__ = [
    "ContractError",
    "DatasetEmptyError",
    "Error",
    "IoError",
    "ParseError",
    "PlacementError",
    "RewardService",
    "SchemaError",
    "__version__",
    "anomaly_counts",
    "composite_reward",
    "default_engine_config",
    "evaluate_dataset",
    "levenshtein",
    "ned",
    "normalize_marked",
    "ocr_baseline_reward",
    "structural_score",
    "synthesize_dataset",
    "tsap_match",
]
