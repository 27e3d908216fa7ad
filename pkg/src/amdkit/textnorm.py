"""Text normalization profiles shared by parsing, matching and attribution.

Two profiles: ``DISPLAY`` keeps the text readable (whitespace cleanup only),
``MATCH`` folds case, diacritics and punctuation so that string metrics and
keyword rules are accent- and punctuation-insensitive. French legislative
text is diacritic-heavy, so everything that compares strings goes through
the MATCH profile first.
"""

from __future__ import annotations

import re
import unicodedata
from enum import Enum

_WS_RE = re.compile(r"\s+")

# Ligatures NFD leaves alone; both are common in French legal prose.
_LIGATURES = str.maketrans({"œ": "oe", "Œ": "OE", "æ": "ae", "Æ": "AE"})

# Number tokens: digits optionally grouped by (thin/no-break) spaces, with a
# comma or point decimal part, e.g. "30 000", "5,5", "1 234,56".
_NUMBER_RE = re.compile(r"\d+(?:[    ]\d{3})*(?:[.,]\d+)?")


class Profile(str, Enum):
    DISPLAY = "display"
    MATCH = "match"


def _strip_diacritics(s: str) -> str:
    decomposed = unicodedata.normalize("NFD", s)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def normalize_text(s: str, profile: Profile = Profile.DISPLAY) -> str:
    """Normalize ``s`` under the given profile. Idempotent for both profiles.

    DISPLAY collapses whitespace runs to single spaces and trims. MATCH
    additionally lowercases, strips diacritics and replaces punctuation with
    spaces (so word boundaries survive, "l'article" -> "l article").
    """
    if profile == Profile.DISPLAY:
        return _WS_RE.sub(" ", s).strip()
    s = s.translate(_LIGATURES)
    s = _strip_diacritics(s).lower()
    # strictly letters and digits; numeric-category symbols like ¼ are noise
    s = "".join(ch if (ch.isalpha() or ch.isdigit()) else " " for ch in s)
    return _WS_RE.sub(" ", s).strip()


def match_key(s: str) -> str:
    """Shorthand for the MATCH profile."""
    return normalize_text(s, Profile.MATCH)


def extract_numeric_tokens(s: str) -> set[str]:
    """Canonical numeric tokens of ``s``: group separators removed, decimal
    comma mapped to a point. "30 000" and "30000" become the same token."""
    out = set()
    for tok in _NUMBER_RE.findall(s):
        canon = re.sub(r"[    ]", "", tok).replace(",", ".")
        out.add(canon)
    return out


def first_token(s: str) -> str:
    """First whitespace-separated token that survives stripping punctuation
    edges (leading guillemets or dashes are not tokens)."""
    for tok in s.split():
        cleaned = tok.strip("\"'«»()[]{},.;:!?-–—")
        if cleaned:
            return cleaned
    return ""


_INFINITIVE_SUFFIXES = ("er", "ir", "re", "oir")


def looks_infinitive(token: str) -> bool:
    """Suffix heuristic for French infinitives (-er/-ir/-re/-oir).

    Deliberately shallow: no morphology, so nouns like "histoire" pass. The
    validation report labels the flag as heuristic.
    """
    t = _strip_diacritics(token).lower()
    return t.endswith(_INFINITIVE_SUFFIXES)
