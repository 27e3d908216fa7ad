"""Canonical domain types for parliamentary amendments.

An amendment carries five zones: the bill it applies to, the targeted
article (an existing one or an "article additionnel" insertion), the
operative legal text (dispositif), the locator sentence opening that text,
and the mandatory rationale (exposé sommaire). All types here are immutable
value objects, safe to share across workers.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass
from enum import Enum

from .textnorm import normalize_text


class Chamber(str, Enum):
    SENATE = "senate"
    NATIONAL_ASSEMBLY = "national_assembly"
    UNKNOWN = "unknown"


class TargetKind(str, Enum):
    EXISTING_ARTICLE = "existing_article"
    ADDITIONAL_ARTICLE = "additional_article"


class Position(str, Enum):
    BEFORE = "before"
    AFTER = "after"
    WITHIN = "within"


@dataclass(frozen=True)
class TargetLocation:
    """Where in the bill the amendment lands."""

    kind: TargetKind
    article_label: str
    position: Position | None = None


@dataclass(frozen=True)
class Amendment:
    id: str
    bill_ref: str
    target: TargetLocation
    dispositif: str
    rationale: str
    dispositif_header: str = ""
    authors: tuple[str, ...] = ()
    chamber: Chamber = Chamber.UNKNOWN
    submitted_at: _dt.date | None = None


@dataclass(frozen=True)
class Violation:
    """One broken invariant: the field concerned and the rule it breaks."""

    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


def validate_amendment(a: Amendment) -> list[Violation]:
    """Check every Amendment invariant; empty list means the record is sound.

    Total function: never raises, one Violation per broken rule.
    """
    violations = []
    if not a.id.strip():
        violations.append(Violation("id", "must be non-empty"))
    if not normalize_text(a.dispositif):
        violations.append(Violation("dispositif", "must be non-empty after whitespace normalization"))
    if not normalize_text(a.rationale):
        violations.append(Violation("rationale", "rationale is mandatory for admissibility"))
    if not a.target.article_label.strip():
        violations.append(Violation("target.article_label", "must be non-empty"))
    if a.target.kind == TargetKind.ADDITIONAL_ARTICLE and a.target.position is None:
        violations.append(Violation("target.position", "required for an additional article"))
    if a.target.kind == TargetKind.EXISTING_ARTICLE and a.target.position is not None:
        violations.append(Violation("target.position", "only meaningful for an additional article"))
    return violations


class DuplicateIdError(ValueError):
    def __init__(self, amendment_id: str):
        self.amendment_id = amendment_id
        super().__init__(f"duplicate amendment id: {amendment_id!r}")


class MixedBillsError(ValueError):
    def __init__(self, bills: list[str]):
        self.bills = bills
        super().__init__(f"corpus mixes bills {bills!r}; pass allow_mixed_bills=True to accept")


@dataclass(frozen=True)
class Corpus:
    """Ordered collection of amendments with unique ids.

    Use :meth:`build` rather than the constructor so the duplicate-id and
    mixed-bill checks run.
    """

    amendments: tuple[Amendment, ...]
    bill_ref: str = ""
    mixed_bills: bool = False

    @classmethod
    def build(cls, amendments: list[Amendment] | tuple[Amendment, ...],
              allow_mixed_bills: bool = False) -> "Corpus":
        seen = set()
        for a in amendments:
            if a.id in seen:
                raise DuplicateIdError(a.id)
            seen.add(a.id)
        bills = sorted({a.bill_ref for a in amendments})
        if len(bills) > 1 and not allow_mixed_bills:
            raise MixedBillsError(bills)
        mixed = len(bills) > 1
        return cls(
            amendments=tuple(amendments),
            bill_ref="" if mixed else (bills[0] if bills else ""),
            mixed_bills=mixed,
        )

    def __len__(self) -> int:
        return len(self.amendments)

    def __iter__(self):
        return iter(self.amendments)

    def by_id(self) -> dict[str, Amendment]:
        return {a.id: a for a in self.amendments}
