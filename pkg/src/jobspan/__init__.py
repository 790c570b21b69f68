"""jobspan: job-title span discovery over vacancy-title corpora.

Builds a word-level containment index over a multiset of normalized vacancy
titles, scores indexed titles by their Title Occurrence Ratio (the share of
occurrences that are standalone), and extracts the job-title subspan of a
vacancy as the best-scoring contained title inside a tuned ratio window.
Ships C-value and identity baselines, an evaluation harness with
containment-safe splits, and a deterministic synthetic corpus generator.
"""

__version__ = "0.1.0"

from .cvalue import CValueEntry, cvalue_extract, cvalue_scores, identity_extract
from .errors import (
    DataFormatError,
    IndexFormatError,
    JobspanError,
    UnindexedTitleError,
)
from .evaluation import (
    LabeledVacancy,
    LabelMetrics,
    Metrics,
    MetricsReport,
    evaluate,
    inclusion_safe_split,
    label_vacancies,
)
from .index import IndexStats, TitleEntry, TitleIndex, build_index, contains
from .normalize import TokenSeq, join, normalize
from .synthgen import GeneratedCorpus, SynthConfig, generate
from .ratio import (
    Bounds,
    Prediction,
    TorScore,
    extract_batch,
    extract_job_title,
    pretrim_for_ner,
    ratio_histogram,
    tor,
    tune_bounds,
)

__all__ = [
    "Bounds",
    "CValueEntry",
    "DataFormatError",
    "GeneratedCorpus",
    "IndexFormatError",
    "IndexStats",
    "JobspanError",
    "LabelMetrics",
    "LabeledVacancy",
    "Metrics",
    "MetricsReport",
    "Prediction",
    "SynthConfig",
    "TitleEntry",
    "TitleIndex",
    "TokenSeq",
    "TorScore",
    "UnindexedTitleError",
    "build_index",
    "contains",
    "cvalue_extract",
    "cvalue_scores",
    "evaluate",
    "extract_batch",
    "extract_job_title",
    "generate",
    "identity_extract",
    "inclusion_safe_split",
    "join",
    "label_vacancies",
    "normalize",
    "pretrim_for_ner",
    "ratio_histogram",
    "tor",
    "tune_bounds",
]
