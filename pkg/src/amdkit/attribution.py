"""Expert-system routing of amendments to bureaus.

Rules pair keyword or regex matchers with a bureau and a weight; scoring is
additive over matched rules and fully deterministic, including tie-breaks.
Matching is scoped to the dispositif, its header and the article label —
never the rationale — and runs on MATCH-normalized text so keywords hit
regardless of case and accents.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .model import Amendment, Corpus
from .textnorm import match_key


class Scope(str, Enum):
    DISPOSITIF = "dispositif"
    DISPOSITIF_HEADER = "dispositif_header"
    ARTICLE_LABEL = "article_label"


class Source(str, Enum):
    AUTO = "auto"
    HUMAN_OVERRIDE = "human_override"


class RulesetError(ValueError):
    pass


class DuplicateRuleIdError(RulesetError):
    def __init__(self, rule_id: str):
        self.rule_id = rule_id
        super().__init__(f"duplicate rule id: {rule_id!r}")


class EmptyPatternError(RulesetError):
    def __init__(self, rule_id: str):
        self.rule_id = rule_id
        super().__init__(f"rule {rule_id!r} has an empty pattern")


class InvalidPatternError(RulesetError):
    def __init__(self, rule_id: str, detail: str):
        self.rule_id = rule_id
        self.detail = detail
        super().__init__(f"rule {rule_id!r}: {detail}")


@dataclass(frozen=True)
class Rule:
    rule_id: str
    bureau: str
    matchers: tuple[re.Pattern, ...]
    scope: frozenset[Scope]
    weight: int = 1


@dataclass(frozen=True)
class Ruleset:
    rules: tuple[Rule, ...]
    min_score: int = 1
    default_bureau: str | None = None


@dataclass(frozen=True)
class Attribution:
    """Routing verdict for one amendment. ``bureau`` is None when no rule
    cleared min_score and no default or override applies. Overrides keep the
    replaced auto verdict in ``previous`` as the audit trail."""

    amendment_id: str
    bureau: str | None
    score: int
    matched_rules: tuple[str, ...] = ()
    source: Source = Source.AUTO
    previous: "Attribution | None" = None


def _compile_matcher(rule_id: str, kind: str, value: str) -> re.Pattern:
    if kind == "keyword":
        normalized = match_key(value)
        if not normalized:
            raise EmptyPatternError(rule_id)
        return re.compile(rf"\b{re.escape(normalized)}\b")
    if kind == "pattern":
        if not value:
            raise EmptyPatternError(rule_id)
        try:
            return re.compile(value, re.IGNORECASE)
        except re.error as exc:
            raise InvalidPatternError(rule_id, f"bad pattern {value!r}: {exc}") from exc
    raise InvalidPatternError(rule_id, f"unknown matcher kind {kind!r}")


def compile_ruleset(config: dict) -> Ruleset:
    """Compile a ruleset configuration document.

    Expected shape: {"min_score"?, "default_bureau"?, "rules": [{"id",
    "bureau", "weight"?, "scope": [..], "patterns": [{"kind", "value"}]}]}.
    Keywords match on MATCH-normalized text with word boundaries; patterns
    are regexes applied to the same normalized text.
    """
    rules = []
    seen_ids: set[str] = set()
    for raw in config.get("rules", []):
        rule_id = str(raw.get("id", ""))
        if not rule_id:
            raise RulesetError("every rule needs a non-empty id")
        if rule_id in seen_ids:
            raise DuplicateRuleIdError(rule_id)
        seen_ids.add(rule_id)
        bureau = str(raw.get("bureau", ""))
        if not bureau:
            raise RulesetError(f"rule {rule_id!r}: bureau required")
        weight = int(raw.get("weight", 1))
        if weight < 1:
            raise RulesetError(f"rule {rule_id!r}: weight must be >= 1")
        raw_scopes = raw.get("scope", [Scope.DISPOSITIF.value])
        try:
            scope = frozenset(Scope(s) for s in raw_scopes)
        except ValueError as exc:
            raise RulesetError(f"rule {rule_id!r}: {exc}") from exc
        if not scope:
            raise RulesetError(f"rule {rule_id!r}: scope must be non-empty")
        patterns = raw.get("patterns", [])
        if not patterns:
            raise EmptyPatternError(rule_id)
        matchers = tuple(
            _compile_matcher(rule_id, p.get("kind", "keyword"), p.get("value", ""))
            for p in patterns
        )
        rules.append(Rule(rule_id, bureau, matchers, scope, weight))
    min_score = int(config.get("min_score", 1))
    if min_score < 1:
        raise RulesetError("min_score must be >= 1")
    default_bureau = config.get("default_bureau")
    return Ruleset(tuple(rules), min_score=min_score, default_bureau=default_bureau)


def load_ruleset(path: str | Path) -> Ruleset:
    with open(path, encoding="utf-8") as fh:
        return compile_ruleset(json.load(fh))


def _scope_texts(a: Amendment) -> dict[Scope, str]:
    return {
        Scope.DISPOSITIF: match_key(a.dispositif),
        Scope.DISPOSITIF_HEADER: match_key(a.dispositif_header),
        Scope.ARTICLE_LABEL: match_key(a.target.article_label),
    }


def attribute(a: Amendment, rs: Ruleset) -> Attribution:
    """Route one amendment: each rule with at least one pattern hit inside
    its scope adds its weight to its bureau; the highest-scoring bureau wins
    when it clears min_score. Ties break by total matched weight, then
    lexicographic bureau name."""
    texts = _scope_texts(a)
    scores: dict[str, int] = {}
    matched: dict[str, list[str]] = {}
    for rule in rs.rules:
        hit = any(
            matcher.search(texts[scope])
            for scope in rule.scope
            for matcher in rule.matchers
        )
        if hit:
            scores[rule.bureau] = scores.get(rule.bureau, 0) + rule.weight
            matched.setdefault(rule.bureau, []).append(rule.rule_id)
    if scores:
        # score and total matched weight coincide under additive weighting;
        # both are kept in the key so the documented tie-break order is explicit
        bureau = min(scores, key=lambda b: (-scores[b], -scores[b], b))
        if scores[bureau] >= rs.min_score:
            return Attribution(
                amendment_id=a.id,
                bureau=bureau,
                score=scores[bureau],
                matched_rules=tuple(matched[bureau]),
            )
    best = max(scores.values(), default=0)
    return Attribution(
        amendment_id=a.id,
        bureau=rs.default_bureau,
        score=best,
        matched_rules=(),
    )


def batch_attribute(corpus: Corpus, rs: Ruleset) -> tuple[list[Attribution], float]:
    """Attribute every amendment in input order; coverage is the assigned
    fraction (1.0 for an empty corpus, by convention)."""
    attributions = [attribute(a, rs) for a in corpus]
    if not attributions:
        return [], 1.0
    assigned = sum(1 for att in attributions if att.bureau is not None)
    return attributions, assigned / len(attributions)


def override(att: Attribution, bureau: str) -> Attribution:
    """Layer a human verdict on top of an automatic one, keeping the auto
    result for audit. Never mutates the original."""
    base = att if att.source == Source.AUTO else att.previous
    return replace(
        att,
        bureau=bureau,
        source=Source.HUMAN_OVERRIDE,
        previous=base,
    )


def ruleset_from_keywords(
    bureau_keywords: dict[str, list[str]],
    min_score: int = 1,
    default_bureau: str | None = None,
) -> Ruleset:
    """Convenience constructor: one keyword rule per bureau."""
    config = {
        "min_score": min_score,
        "default_bureau": default_bureau,
        "rules": [
            {
                "id": f"kw-{i:03d}",
                "bureau": bureau,
                "scope": [Scope.DISPOSITIF.value, Scope.DISPOSITIF_HEADER.value],
                "patterns": [{"kind": "keyword", "value": kw} for kw in keywords],
            }
            for i, (bureau, keywords) in enumerate(sorted(bureau_keywords.items()))
        ],
    }
    return compile_ruleset(config)
