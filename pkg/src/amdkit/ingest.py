"""Parsing and serialization of amendment documents.

Two input shapes: a JSON object per line (the canonical interchange format)
and a plain-text form with the five standard zones of a submitted amendment
(bill header, article line, dispositif, its locator header, and the
rationale introduced by the EXPOSÉ SOMMAIRE marker). The same labeled-header
rendering used here to flatten an amendment back to text is what the
summarizer embeds in prompts and what the training-pair exporter emits.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .model import (
    Amendment,
    Chamber,
    Corpus,
    Position,
    TargetKind,
    TargetLocation,
    validate_amendment,
)
from .textnorm import match_key, normalize_text


class ParseError(ValueError):
    """Base for per-record parsing failures; carries a record locator."""

    def __init__(self, message: str, locator: str = ""):
        self.locator = locator
        super().__init__(f"{message}{f' (record {locator})' if locator else ''}")


class MissingFieldError(ParseError):
    def __init__(self, name: str, locator: str = ""):
        self.name = name
        super().__init__(f"missing field {name!r}", locator)


class EmptyDispositifError(ParseError):
    def __init__(self, locator: str = ""):
        super().__init__("dispositif is empty", locator)


class MalformedDateError(ParseError):
    def __init__(self, value: str, locator: str = ""):
        self.value = value
        super().__init__(f"not a calendar date: {value!r}", locator)


class InvalidRecordError(ParseError):
    def __init__(self, violations, locator: str = ""):
        self.violations = violations
        detail = "; ".join(str(v) for v in violations)
        super().__init__(f"invalid amendment: {detail}", locator)


class MissingSectionError(ParseError):
    def __init__(self, zone: str, locator: str = ""):
        self.zone = zone
        super().__init__(f"missing section {zone!r}", locator)


@dataclass
class ParseReport:
    parsed_count: int = 0
    rejected: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class TrainingPair:
    instruction_text: str
    summary_text: str


# ---------------------------------------------------------------------------
# JSON records


def parse_json_record(record: dict, locator: str = "") -> Amendment:
    """Build a validated Amendment from one interchange record."""
    loc = locator or str(record.get("id", ""))
    for name in ("id", "bill_ref", "target", "dispositif", "rationale"):
        if name not in record:
            raise MissingFieldError(name, loc)
    target_raw = record["target"]
    for name in ("kind", "article_label"):
        if name not in target_raw:
            raise MissingFieldError(f"target.{name}", loc)
    if not normalize_text(str(record["dispositif"])):
        raise EmptyDispositifError(loc)
    try:
        kind = TargetKind(target_raw["kind"])
        position = (
            Position(target_raw["position"]) if target_raw.get("position") is not None else None
        )
        chamber = Chamber(record.get("chamber", Chamber.UNKNOWN.value))
    except ValueError as exc:
        raise ParseError(str(exc), loc) from exc
    submitted_at = None
    if record.get("submitted_at") is not None:
        try:
            submitted_at = _dt.date.fromisoformat(str(record["submitted_at"]))
        except ValueError as exc:
            raise MalformedDateError(str(record["submitted_at"]), loc) from exc
    amendment = Amendment(
        id=str(record["id"]),
        bill_ref=str(record["bill_ref"]),
        target=TargetLocation(kind=kind, article_label=str(target_raw["article_label"]), position=position),
        dispositif=str(record["dispositif"]),
        dispositif_header=str(record.get("dispositif_header", "")),
        rationale=str(record["rationale"]),
        authors=tuple(record.get("authors", ())),
        chamber=chamber,
        submitted_at=submitted_at,
    )
    violations = validate_amendment(amendment)
    if violations:
        raise InvalidRecordError(violations, loc)
    return amendment


def amendment_to_record(a: Amendment) -> dict:
    """Inverse of :func:`parse_json_record` on valid amendments."""
    target: dict = {"kind": a.target.kind.value, "article_label": a.target.article_label}
    if a.target.position is not None:
        target["position"] = a.target.position.value
    record = {
        "id": a.id,
        "bill_ref": a.bill_ref,
        "target": target,
        "dispositif": a.dispositif,
        "dispositif_header": a.dispositif_header,
        "rationale": a.rationale,
        "authors": list(a.authors),
        "chamber": a.chamber.value,
    }
    if a.submitted_at is not None:
        record["submitted_at"] = a.submitted_at.isoformat()
    return record


# ---------------------------------------------------------------------------
# plain text


_ARTICLE_LINE_RE = re.compile(r"^article\b")
_SENTENCE_END_RE = re.compile(r"(?<=[.!?])\s+")

# phrases whose presence marks the opening sentence as an insertion locator
_LOCATOR_HINTS = (
    "apres l article", "avant l article", "inserer", "est insere",
    "est inseree", "est complete", "est ainsi modifie", "est ainsi redige",
    "rediger ainsi", "alinea", "est abroge", "est supprime", "est remplace",
)

_POSITION_WORDS = (
    ("avant", Position.BEFORE),
    ("apres", Position.AFTER),
    ("au sein", Position.WITHIN),
)


def _synth_id(document: str) -> str:
    digest = hashlib.sha1(match_key(document).encode("utf-8")).hexdigest()
    return f"amd-{digest[:12]}"


def _parse_article_line(line: str) -> TargetLocation:
    key = match_key(line)
    if "additionnel" in key:
        position = Position.AFTER
        for word, pos in _POSITION_WORDS:
            if word in key:
                position = pos
                break
        label = re.sub(r"(?i)article\s+additionnel", "", line).strip()
        label = re.sub(r"(?i)^(avant|après|apres|au sein de)\s+", "", label).strip()
        label = label if label else line.strip()
        return TargetLocation(TargetKind.ADDITIONAL_ARTICLE, article_label=label, position=position)
    return TargetLocation(TargetKind.EXISTING_ARTICLE, article_label=line.strip())


def first_sentence(text: str) -> str:
    """First sentence of ``text``; dots between digits do not end a sentence."""
    normalized = normalize_text(text)
    parts = _SENTENCE_END_RE.split(normalized, maxsplit=1)
    return parts[0]


def parse_plaintext(document: str, record_id: str | None = None) -> Amendment:
    """Segment a plain-text amendment into its five zones.

    Layout: first non-empty line is the bill header, next line the article
    line (must start with "Article"; "Article additionnel" marks an
    insertion), then the dispositif body up to the EXPOSÉ SOMMAIRE marker,
    then the rationale. The dispositif header is the body's first sentence
    when it reads as an insertion locator. Without ``record_id`` the id is a
    content hash, so identical documents parse to identical ids.
    """
    lines = document.splitlines()
    nonempty = [(i, ln.strip()) for i, ln in enumerate(lines) if ln.strip()]
    if not nonempty:
        raise MissingSectionError("bill_header")

    first_idx, first_line = nonempty[0]
    if _ARTICLE_LINE_RE.match(match_key(first_line)):
        raise MissingSectionError("bill_header")
    bill_ref = re.sub(r"(?i)^projet de loi\s*:?\s*", "", first_line).strip() or first_line

    article_entry = next(
        ((i, ln) for i, ln in nonempty[1:] if _ARTICLE_LINE_RE.match(match_key(ln))),
        None,
    )
    if article_entry is None:
        raise MissingSectionError("article")
    article_idx, article_line = article_entry
    target = _parse_article_line(article_line)

    marker_idx = None
    for i, ln in nonempty:
        if i <= article_idx:
            continue
        if match_key(ln) in ("expose sommaire", "expose des motifs"):
            marker_idx = i
            break
    if marker_idx is None:
        raise MissingSectionError("rationale")

    body_lines = [ln for ln in lines[article_idx + 1 : marker_idx] if ln.strip()]
    if body_lines and match_key(body_lines[0]) == "dispositif":
        body_lines = body_lines[1:]
    dispositif = normalize_text("\n".join(body_lines))
    if not dispositif:
        raise MissingSectionError("dispositif")

    rationale = normalize_text("\n".join(lines[marker_idx + 1 :]))
    if not rationale:
        raise MissingSectionError("rationale")

    opening = first_sentence(dispositif)
    opening_key = match_key(opening)
    header = opening if any(h in opening_key for h in _LOCATOR_HINTS) else ""

    amendment = Amendment(
        id=record_id or _synth_id(document),
        bill_ref=bill_ref,
        target=target,
        dispositif=dispositif,
        dispositif_header=header,
        rationale=rationale,
    )
    violations = validate_amendment(amendment)
    if violations:
        raise InvalidRecordError(violations, amendment.id)
    return amendment


def render_amendment_text(a: Amendment) -> str:
    """Flatten an amendment to the labeled plain-text form. Round-trips
    through :func:`parse_plaintext` up to whitespace normalization."""
    if a.target.kind == TargetKind.ADDITIONAL_ARTICLE:
        position_fr = {
            Position.BEFORE: "avant",
            Position.AFTER: "après",
            Position.WITHIN: "au sein de",
        }[a.target.position or Position.AFTER]
        article_line = f"Article additionnel {position_fr} {a.target.article_label}"
    else:
        article_line = a.target.article_label
        if not match_key(article_line).startswith("article"):
            article_line = f"Article {article_line}"
    return (
        f"PROJET DE LOI : {a.bill_ref}\n"
        f"{article_line}\n"
        f"{a.dispositif}\n"
        f"EXPOSÉ SOMMAIRE\n"
        f"{a.rationale}"
    )


# ---------------------------------------------------------------------------
# corpus files (JSON lines)


def iter_jsonl(path: str | Path) -> Iterator[tuple[str, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            yield f"line {lineno}", json.loads(line)


def load_corpus(path: str | Path, allow_mixed_bills: bool = False) -> tuple[Corpus, ParseReport]:
    report = ParseReport()
    amendments = []
    for locator, record in iter_jsonl(path):
        try:
            amendments.append(parse_json_record(record, locator))
            report.parsed_count += 1
        except ParseError as exc:
            report.rejected.append((locator, str(exc)))
    return Corpus.build(amendments, allow_mixed_bills=allow_mixed_bills), report


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a in corpus:
            fh.write(json.dumps(amendment_to_record(a), ensure_ascii=False) + "\n")


def ingest_plaintext_file(path: str | Path) -> tuple[Corpus, ParseReport]:
    """One or more plain-text amendments separated by lines of '==='."""
    text = Path(path).read_text(encoding="utf-8")
    documents = [doc for doc in re.split(r"(?m)^===+\s*$", text) if doc.strip()]
    report = ParseReport()
    amendments = []
    for i, doc in enumerate(documents, start=1):
        try:
            amendments.append(parse_plaintext(doc))
            report.parsed_count += 1
        except ParseError as exc:
            report.rejected.append((f"document {i}", str(exc)))
    return Corpus.build(amendments), report


# ---------------------------------------------------------------------------
# fine-tune export


INSTRUCTION_TEMPLATE_NOTE = (
    "instruction = labeled rendering: bill header, article line, dispositif, "
    "EXPOSÉ SOMMAIRE, rationale"
)


def export_training_pairs(
    corpus: Corpus,
    summaries: dict[str, str],
    min_summary_chars: int = 10,
) -> tuple[list[TrainingPair], ParseReport]:
    """One instruction/summary pair per amendment with a usable reference
    summary. Amendments without a summary, or whose summary normalizes below
    ``min_summary_chars``, are reported as rejections, never dropped
    silently."""
    report = ParseReport(warnings=[INSTRUCTION_TEMPLATE_NOTE])
    pairs = []
    for a in corpus:
        summary = summaries.get(a.id, "")
        if not summary.strip():
            report.rejected.append((a.id, "missing summary"))
            continue
        if len(match_key(summary)) < min_summary_chars:
            report.rejected.append((a.id, "low-quality summary"))
            continue
        pairs.append(
            TrainingPair(
                instruction_text=render_amendment_text(a),
                summary_text=normalize_text(summary),
            )
        )
        report.parsed_count += 1
    return pairs, report


def save_training_pairs(pairs: Iterable[TrainingPair], path: str | Path) -> None:
    """JSON-lines {"instruction", "output"} records, plus a sidecar
    ``<path>.meta.json`` documenting the instruction rendering."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(
                json.dumps(
                    {"instruction": pair.instruction_text, "output": pair.summary_text},
                    ensure_ascii=False,
                )
                + "\n"
            )
    meta = {"instruction_template": INSTRUCTION_TEMPLATE_NOTE}
    path.with_suffix(path.suffix + ".meta.json").write_text(
        json.dumps(meta, ensure_ascii=False, indent=2), encoding="utf-8"
    )
