"""Blind-review score aggregation and bias-report aggregation.

Panel ratings come in on a 0-10 scale and are reported on the 20-point
scale: mean_20 = 2 * mean(ratings), std_20 = 2 * population standard
deviation (the estimator choice is pinned here and echoed in the output
metadata). The reference leaderboard is read-only published data shipped
with the package. Bias reporting consumes externally produced labels
(polarity for gender/ethnicity, hurtful completions for political prompts);
running the classifiers themselves is out of scope.
"""

from __future__ import annotations

import csv
import importlib.resources
import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable


class EmptyReviewSetError(ValueError):
    def __init__(self, system_name: str):
        super().__init__(f"no reviews for system {system_name!r}")


class UnknownLabelError(ValueError):
    def __init__(self, label: str, allowed: tuple[str, ...]):
        self.label = label
        super().__init__(f"label {label!r} not in {allowed}")


@dataclass(frozen=True)
class ReviewScore:
    reviewer_id: str
    item_id: str
    rating: int

    def __post_init__(self):
        if not 0 <= self.rating <= 10:
            raise ValueError(f"rating must be in 0..10, got {self.rating}")


@dataclass(frozen=True)
class SystemResult:
    system_name: str
    mean_20: float
    std_20: float
    n_items: int
    n_reviewers: int
    std_estimator: str = "population"


class BiasDimension(str, Enum):
    GENDER = "gender"
    ETHNICITY = "ethnicity"
    POLITICAL = "political"


REGARD_LABELS = ("positive", "neutral", "negative", "other")
HONEST_LABELS = ("hurtful", "not_hurtful")

# groups expected per dimension; absent ones are reported, not silently dropped
EXPECTED_GROUPS = {
    BiasDimension.GENDER: ("female", "male"),
    BiasDimension.ETHNICITY: ("african", "asian", "european", "hispanic"),
    BiasDimension.POLITICAL: ("left-wing", "right-wing"),
}


@dataclass(frozen=True)
class BiasReport:
    dimension: BiasDimension
    # regard dimensions: group -> {label: fraction}; political: group -> hurtful fraction
    distributions: dict[str, dict[str, float]] = field(default_factory=dict)
    hurtful_fractions: dict[str, float] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


def aggregate_scores(reviews: Iterable[ReviewScore], system_name: str) -> SystemResult:
    """Average the panel's 0-10 ratings and scale to the 20-point system.

    The spread is the population standard deviation over all ratings, scaled
    by the same factor; the estimator is named in the result so nobody has
    to guess."""
    reviews = list(reviews)
    if not reviews:
        raise EmptyReviewSetError(system_name)
    # summing in sorted order makes the result exactly invariant under
    # review permutation, not just up to float reassociation
    ratings = sorted(r.rating for r in reviews)
    n = len(ratings)
    mean = sum(ratings) / n
    variance = sum((x - mean) ** 2 for x in ratings) / n
    return SystemResult(
        system_name=system_name,
        mean_20=2.0 * mean,
        std_20=2.0 * math.sqrt(variance),
        n_items=len({r.item_id for r in reviews}),
        n_reviewers=len({r.reviewer_id for r in reviews}),
    )


def reference_leaderboard() -> list[SystemResult]:
    """The published panel results shipped as package data, unchanged."""
    raw = json.loads(
        importlib.resources.files("amdkit").joinpath("data/leaderboard.json").read_text("utf-8")
    )
    return [
        SystemResult(
            system_name=row["system_name"],
            mean_20=row["mean_20"],
            std_20=row["std_20"],
            n_items=raw["n_items"],
            n_reviewers=raw["n_reviewers"],
        )
        for row in raw["systems"]
    ]


def reference_bias_rows() -> dict:
    """Published hurtful-completion fractions per political group."""
    return json.loads(
        importlib.resources.files("amdkit").joinpath("data/bias_reference.json").read_text("utf-8")
    )["political_hurtful_fraction"]


def bias_report(
    labeled: Iterable[tuple[str, str]], dimension: BiasDimension | str
) -> BiasReport:
    """Aggregate (group, label) records into per-group statistics.

    Gender and ethnicity use polarity labels and yield per-group empirical
    distributions; the political dimension uses hurtful/not_hurtful labels
    and yields hurtful fractions. Expected groups with zero records are
    omitted from results and listed in warnings.
    """
    dimension = BiasDimension(dimension)
    allowed = HONEST_LABELS if dimension == BiasDimension.POLITICAL else REGARD_LABELS
    counts: dict[str, dict[str, int]] = {}
    for group, label in labeled:
        if label not in allowed:
            raise UnknownLabelError(label, allowed)
        counts.setdefault(group, dict.fromkeys(allowed, 0))[label] += 1

    warnings = tuple(
        f"no records for group {g!r}" for g in EXPECTED_GROUPS[dimension] if g not in counts
    )
    if dimension == BiasDimension.POLITICAL:
        fractions = {
            group: c["hurtful"] / sum(c.values()) for group, c in sorted(counts.items())
        }
        return BiasReport(dimension=dimension, hurtful_fractions=fractions, warnings=warnings)
    distributions = {
        group: {label: c[label] / sum(c.values()) for label in allowed}
        for group, c in sorted(counts.items())
    }
    return BiasReport(dimension=dimension, distributions=distributions, warnings=warnings)


# ---------------------------------------------------------------------------
# blind review packs

REVIEW_SHEET_FIELDS = ("reviewer_id", "item_id", "system_hidden_key", "rating")


def blind_pack(
    items: list[tuple[str, str, str]], seed: int
) -> tuple[list[dict], dict[str, str]]:
    """Prepare a blinded review sheet from (system_name, item_id, text) rows.

    Systems are renamed to opaque keys and rows shuffled with the given
    seed; the returned key map is the seal that later unblinds ratings.
    """
    rng = random.Random(seed)
    systems = sorted({system for system, _, _ in items})
    shuffled_systems = systems[:]
    rng.shuffle(shuffled_systems)
    key_of = {system: f"S{i:02d}" for i, system in enumerate(shuffled_systems)}
    rows = [
        {
            "reviewer_id": "",
            "item_id": item_id,
            "system_hidden_key": key_of[system],
            "text": text,
            "rating": "",
        }
        for system, item_id, text in items
    ]
    rng.shuffle(rows)
    return rows, {v: k for k, v in key_of.items()}


def write_blind_pack(rows: list[dict], key: dict[str, str], sheet_path: str | Path, key_path: str | Path) -> None:
    with open(sheet_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()) if rows else list(REVIEW_SHEET_FIELDS))
        writer.writeheader()
        writer.writerows(rows)
    Path(key_path).write_text(json.dumps(key, indent=2, sort_keys=True), encoding="utf-8")


def load_reviews(path: str | Path) -> list[tuple[str, ReviewScore]]:
    """Read a filled review sheet: (hidden system key, score) pairs."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if not str(row.get("rating", "")).strip():
                continue
            out.append(
                (
                    row["system_hidden_key"],
                    ReviewScore(
                        reviewer_id=row["reviewer_id"],
                        item_id=row["item_id"],
                        rating=int(row["rating"]),
                    ),
                )
            )
    return out


def aggregate_blind_reviews(
    reviews: list[tuple[str, ReviewScore]], key: dict[str, str]
) -> list[SystemResult]:
    """Unblind and aggregate a filled review sheet, sorted by system name."""
    per_system: dict[str, list[ReviewScore]] = {}
    for hidden_key, review in reviews:
        per_system.setdefault(key[hidden_key], []).append(review)
    return [
        aggregate_scores(rows, system) for system, rows in sorted(per_system.items())
    ]
