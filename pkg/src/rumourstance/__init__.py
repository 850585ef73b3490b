"""Rumour stance (support/deny/query/comment) classification for tweet threads."""

__version__ = "0.1.0"

from .corpus import (  # noqa: E402
    LABELS,
    ConversationThread,
    Dataset,
    StanceLabel,
    Tweet,
    balanced_subset,
    class_counts,
    depth_of,
    load_flat,
    load_semeval,
)
from .features import CONFIGS, FeatureConfig, build_matrix, extract, get_config  # noqa: E402
from .lexicons import LexiconRegistry  # noqa: E402
from .svm import KernelSpec, StanceModel, TrainParams, train_binary, train_multiclass  # noqa: E402

__all__ = [
    "LABELS",
    "CONFIGS",
    "ConversationThread",
    "Dataset",
    "FeatureConfig",
    "KernelSpec",
    "LexiconRegistry",
    "StanceLabel",
    "StanceModel",
    "TrainParams",
    "Tweet",
    "balanced_subset",
    "build_matrix",
    "class_counts",
    "depth_of",
    "extract",
    "get_config",
    "load_flat",
    "load_semeval",
    "train_binary",
    "train_multiclass",
]
