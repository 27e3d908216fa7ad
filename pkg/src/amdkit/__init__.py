"""Amendment processing toolkit: attribution, similarity research, summaries."""

from .model import (
    Amendment,
    Chamber,
    Corpus,
    Position,
    TargetKind,
    TargetLocation,
    validate_amendment,
)
from .similarity import (
    DuplicateCluster,
    Metric,
    SimilarityMatch,
    build_index,
    candidate_pairs,
    find_duplicates,
    fuzzy_ratio,
    jaro,
    jaro_winkler,
)
from .textnorm import Profile, normalize_text

__all__ = [
    "Amendment",
    "Chamber",
    "Corpus",
    "Position",
    "TargetKind",
    "TargetLocation",
    "validate_amendment",
    "DuplicateCluster",
    "Metric",
    "SimilarityMatch",
    "build_index",
    "candidate_pairs",
    "find_duplicates",
    "fuzzy_ratio",
    "jaro",
    "jaro_winkler",
    "Profile",
    "normalize_text",
]
