"""Corpus analysis toolkit for Scratch project archives.

Parses .sb2/.sb3 archives into one normalized AST and derives code
metrics, smell findings, topic models over project text, 2-d embeddings
and two-group statistics, all behind a deterministic CLI.
"""

from .model import (
    Block,
    BlockRef,
    Literal,
    MenuSelection,
    Project,
    Script,
    Sprite,
)
from .ingest import Corpus, load_corpus, load_project
from .metrics import MetricRecord, compute_metric_record
from .smells import SmellConfig, SmellFinding, detect_smells
from .topics import DocumentTermMatrix, build_dtm, extract_tokens, preprocess
from .lda import TopicModel, fit_lda
from .tsne import EmbeddingConfig, EmbeddingResult, tsne
from .stats import GroupComparison, filter_outliers_iqr, rank_sum_test

__version__ = "0.1.0"

__all__ = [
    "Block",
    "BlockRef",
    "Corpus",
    "DocumentTermMatrix",
    "EmbeddingConfig",
    "EmbeddingResult",
    "GroupComparison",
    "Literal",
    "MenuSelection",
    "MetricRecord",
    "Project",
    "Script",
    "SmellConfig",
    "SmellFinding",
    "Sprite",
    "TopicModel",
    "build_dtm",
    "compute_metric_record",
    "detect_smells",
    "extract_tokens",
    "filter_outliers_iqr",
    "fit_lda",
    "load_corpus",
    "load_project",
    "preprocess",
    "rank_sum_test",
    "tsne",
    "__version__",
]
