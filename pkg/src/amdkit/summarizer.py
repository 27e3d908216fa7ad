"""Summary generation against a pluggable completion backend.

The wire contract is the smallest one any serving stack can adapt to:
JSON-over-HTTP POST {"model", "prompt", "max_tokens", "temperature"} with a
{"text"} response and bearer auth from an environment variable. A
deterministic mock backend stands in for the real model in tests and
offline runs; it never touches the network, which the client's call
recorder can prove.

validate_summary checks the house norms for a usable summary: a single
sentence, opening on an infinitive (suffix heuristic, labeled as such),
every figure traceable to the source amendment, and bounded length.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

import requests

from .ingest import first_sentence, render_amendment_text
from .model import Amendment, Corpus
from .prompts import PromptMode, build_prompt, get_template
from .textnorm import extract_numeric_tokens, first_token, looks_infinitive, match_key


class Provenance(str, Enum):
    GENERATED = "generated"
    HUMAN_EDITED = "human_edited"


class BackendError(RuntimeError):
    pass


class BackendUnreachableError(BackendError):
    def __init__(self, attempts: int, last_error: str):
        self.attempts = attempts
        self.last_error = last_error
        super().__init__(f"backend unreachable after {attempts} attempts: {last_error}")


class BackendRejectedError(BackendError):
    def __init__(self, status: int, body_excerpt: str):
        self.status = status
        self.body_excerpt = body_excerpt[:200]
        super().__init__(f"backend rejected request ({status}): {self.body_excerpt}")


class EmptyCompletionError(BackendError):
    def __init__(self):
        super().__init__("backend returned an empty completion")


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "http"  # "http" or "mock"
    endpoint_url: str = ""
    model_name: str = "completion-model"
    max_tokens: int = 160
    temperature: float = 0.0
    timeout_seconds: float = 120.0
    max_attempts: int = 3
    backoff_seconds: float = 0.5
    auth_env: str = "AMD_BACKEND_TOKEN"
    max_in_flight: int = 4

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass(frozen=True)
class ValidationReport:
    single_sentence: bool
    starts_with_infinitive: bool
    figures_preserved: bool
    length_ok: bool
    details: tuple[str, ...] = ()

    @property
    def all_ok(self) -> bool:
        return (
            self.single_sentence
            and self.starts_with_infinitive
            and self.figures_preserved
            and self.length_ok
        )


@dataclass(frozen=True)
class SummaryRecord:
    summary_id: str
    amendment_id: str
    text: str
    backend_id: str
    template_id: str
    created_at: str
    validation: ValidationReport
    provenance: Provenance = Provenance.GENERATED
    parent_summary_id: str | None = None
    attempts: int = 1


# ---------------------------------------------------------------------------
# summary validation

# interior dots that do not end a sentence when they close these tokens
_ABBREVIATIONS = frozenset(
    {"art", "al", "cf", "etc", "m", "mm", "mme", "mmes", "p", "pp", "vol", "no"}
)
_TERMINAL_RE = re.compile(r"\.{3}|…|[.!?]")
_TOKEN_LIMIT = 60


def _terminal_marks(text: str) -> list[int]:
    """Positions of sentence-ending punctuation, skipping decimal points,
    abbreviation dots and treating an ellipsis as a single mark."""
    marks = []
    for m in _TERMINAL_RE.finditer(text):
        start, end = m.start(), m.end()
        ch = m.group()
        if ch == ".":
            before = text[start - 1] if start else ""
            after = text[end] if end < len(text) else ""
            if before.isdigit() and after.isdigit():
                continue  # decimal point
            word = re.split(r"\s", text[:start])[-1].strip("\"'«»()").lower()
            if word in _ABBREVIATIONS:
                continue
        marks.append(start)
    return marks


def validate_summary(summary: str, source: Amendment) -> ValidationReport:
    """Flag report for one candidate summary against its source amendment.

    The infinitive check is a French suffix heuristic (-er/-ir/-re/-oir),
    not morphology. Figures compare canonical numeric tokens, so "30 000"
    in the summary matches "30000" in the source and decimal commas match
    decimal points.
    """
    details: list[str] = []
    stripped = summary.strip()

    marks = _terminal_marks(stripped)
    ends_with_mark = bool(marks) and any(
        stripped.endswith(suffix) for suffix in (".", "!", "?", "…")
    ) and marks[-1] >= len(stripped) - 3
    single_sentence = len(marks) == 1 and ends_with_mark
    if not single_sentence:
        if not marks:
            details.append("no terminal punctuation")
        elif len(marks) > 1:
            details.append(f"{len(marks)} sentence-ending marks, expected exactly 1")
        else:
            details.append("terminal punctuation is not at the end")

    opener = first_token(stripped)
    starts_with_infinitive = looks_infinitive(opener) if opener else False
    if not starts_with_infinitive:
        details.append(
            f"first token {opener!r} does not look like an infinitive (heuristic)"
        )

    source_figures = extract_numeric_tokens(render_amendment_text(source))
    summary_figures = extract_numeric_tokens(stripped)
    missing = sorted(summary_figures - source_figures)
    figures_preserved = not missing
    if missing:
        details.append("figures absent from the amendment: " + ", ".join(missing))

    n_tokens = len(stripped.split())
    length_ok = n_tokens <= _TOKEN_LIMIT
    if not length_ok:
        details.append(f"{n_tokens} tokens exceeds the {_TOKEN_LIMIT}-token limit")

    return ValidationReport(
        single_sentence=single_sentence,
        starts_with_infinitive=starts_with_infinitive,
        figures_preserved=figures_preserved,
        length_ok=length_ok,
        details=tuple(details),
    )


# ---------------------------------------------------------------------------
# mock backend

_MOCK_TRUNCATE_TOKENS = 40


def mock_backend(prompt: str) -> str:
    """Deterministic stand-in completion: the first sentence of the
    dispositif embedded in the prompt, truncated to 40 tokens, prefixed with
    "Modifier " (and the original initial lowercased) when the sentence does
    not already open on an infinitive. Pure function of the prompt bytes."""
    anchor = prompt.find("PROJET DE LOI")
    if anchor < 0:
        raise ValueError("prompt does not embed a rendered amendment")
    lines = prompt[anchor:].splitlines()
    article_idx = None
    marker_idx = None
    for i, line in enumerate(lines):
        key = match_key(line)
        if article_idx is None and i > 0 and key.startswith("article"):
            article_idx = i
        elif article_idx is not None and key.startswith("expose sommaire"):
            marker_idx = i
            break
    if article_idx is None or marker_idx is None:
        raise ValueError("prompt does not embed a rendered amendment")
    dispositif = " ".join(lines[article_idx + 1 : marker_idx]).strip()
    sentence = first_sentence(dispositif)
    tokens = sentence.split()
    if len(tokens) > _MOCK_TRUNCATE_TOKENS:
        sentence = " ".join(tokens[:_MOCK_TRUNCATE_TOKENS])
    if looks_infinitive(first_token(sentence)):
        return sentence
    return f"Modifier {sentence[0].lower()}{sentence[1:]}" if sentence else "Modifier"


# ---------------------------------------------------------------------------
# HTTP transport


class TransportFailure(Exception):
    """Connection-level failure or timeout; always worth retrying."""


def _requests_post(url: str, payload: dict, headers: dict, timeout: float) -> tuple[int, str]:
    try:
        response = requests.post(url, json=payload, headers=headers, timeout=timeout)
    except (requests.ConnectionError, requests.Timeout) as exc:
        raise TransportFailure(str(exc)) from exc
    return response.status_code, response.text


class CompletionClient:
    """Completion transport with retry and exponential backoff.

    Every network attempt lands in ``calls`` so tests can assert exactly
    when the wire was touched (and that the mock backend never touches it).
    ``post_fn`` and ``sleep_fn`` are injectable for fault scripting.
    """

    def __init__(
        self,
        post_fn: Callable[[str, dict, dict, float], tuple[int, str]] | None = None,
        sleep_fn: Callable[[float], None] = time.sleep,
    ):
        self.post_fn = post_fn or _requests_post
        self.sleep_fn = sleep_fn
        self.calls: list[dict] = []

    def complete(self, prompt: str, cfg: BackendConfig) -> tuple[str, int]:
        """Return (completion text, attempts used)."""
        payload = {
            "model": cfg.model_name,
            "prompt": prompt,
            "max_tokens": cfg.max_tokens,
            "temperature": cfg.temperature,
        }
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(cfg.auth_env, "") if cfg.auth_env else ""
        if token:
            headers["Authorization"] = f"Bearer {token}"

        last_error = ""
        for attempt in range(1, cfg.max_attempts + 1):
            self.calls.append({"url": cfg.endpoint_url, "attempt": attempt})
            try:
                status, body = self.post_fn(cfg.endpoint_url, payload, headers, cfg.timeout_seconds)
            except TransportFailure as exc:
                last_error = str(exc)
                if attempt < cfg.max_attempts:
                    self.sleep_fn(cfg.backoff_seconds * 2 ** (attempt - 1))
                continue
            if status in (429,) or 500 <= status < 600:
                last_error = f"status {status}"
                if attempt < cfg.max_attempts:
                    self.sleep_fn(cfg.backoff_seconds * 2 ** (attempt - 1))
                continue
            if not 200 <= status < 300:
                raise BackendRejectedError(status, body)
            try:
                text = json.loads(body)["text"]
            except (ValueError, KeyError, TypeError) as exc:
                raise BackendRejectedError(status, f"unusable response body: {exc}") from exc
            return str(text), attempt
        raise BackendUnreachableError(cfg.max_attempts, last_error)


# ---------------------------------------------------------------------------
# summarize


def _summary_id(amendment_id: str, template_id: str, backend_id: str, text: str, parent: str | None) -> str:
    digest = hashlib.sha256(
        "\x1f".join((amendment_id, template_id, backend_id, text, parent or "")).encode("utf-8")
    ).hexdigest()
    return f"sum-{digest[:12]}"


def summarize(
    a: Amendment,
    backend: BackendConfig,
    mode: PromptMode = PromptMode.ZERO_SHOT,
    client: CompletionClient | None = None,
    clock: Callable[[], str] | None = None,
    repaired_exemplars: bool = False,
) -> SummaryRecord:
    """Generate one summary record. With a mock backend the result is a pure
    function of the amendment (no network, attempts = 1)."""
    template = get_template(mode, repaired_exemplars)
    prompt = build_prompt(a, mode, repaired_exemplars)
    if backend.kind == "mock":
        text, attempts = mock_backend(prompt), 1
        backend_id = "mock"
    else:
        client = client or CompletionClient()
        text, attempts = client.complete(prompt, backend)
        backend_id = backend.model_name
    text = text.strip()
    if not text:
        raise EmptyCompletionError()
    created_at = clock() if clock else _dt.datetime.now(_dt.timezone.utc).isoformat()
    return SummaryRecord(
        summary_id=_summary_id(a.id, template.template_id, backend_id, text, None),
        amendment_id=a.id,
        text=text,
        backend_id=backend_id,
        template_id=template.template_id,
        created_at=created_at,
        validation=validate_summary(text, a),
        provenance=Provenance.GENERATED,
        attempts=attempts,
    )


def edit_summary(
    record: SummaryRecord,
    new_text: str,
    source: Amendment,
    clock: Callable[[], str] | None = None,
) -> SummaryRecord:
    """Human-edited revision: re-validated, chained to its parent."""
    text = new_text.strip()
    if not text:
        raise ValueError("edited summary must be non-empty")
    created_at = clock() if clock else _dt.datetime.now(_dt.timezone.utc).isoformat()
    return replace(
        record,
        summary_id=_summary_id(record.amendment_id, record.template_id, record.backend_id, text, record.summary_id),
        text=text,
        created_at=created_at,
        validation=validate_summary(text, source),
        provenance=Provenance.HUMAN_EDITED,
        parent_summary_id=record.summary_id,
    )


def summarize_corpus(
    corpus: Corpus,
    backend: BackendConfig,
    mode: PromptMode = PromptMode.ZERO_SHOT,
    client: CompletionClient | None = None,
    clock: Callable[[], str] | None = None,
    skip_ids: frozenset[str] | set[str] = frozenset(),
) -> list[SummaryRecord]:
    """Summarize every amendment not in ``skip_ids``, bounded concurrency,
    results in input order."""
    todo = [a for a in corpus if a.id not in skip_ids]
    if backend.kind == "mock" or backend.max_in_flight <= 1:
        return [summarize(a, backend, mode, client, clock) for a in todo]
    with ThreadPoolExecutor(max_workers=backend.max_in_flight) as pool:
        futures = [pool.submit(summarize, a, backend, mode, client, clock) for a in todo]
        return [f.result() for f in futures]
