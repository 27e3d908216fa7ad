"""Learning-free near-duplicate detection over amendment dispositifs.

Three character-level metrics (Jaro, Jaro-Winkler, normalized indel ratio),
an n-gram blocking index so large corpora avoid the full quadratic scan, and
transitive clustering of the match graph. Matching always runs on the
MATCH-normalized dispositif: the main body is what decides whether two
amendments are counterparts, headers and rationale stay out of it.

The bulk scorer used by :func:`find_duplicates` compiles the metric kernels
with numba when available and falls back to the pure-Python functions
otherwise; both routes compute the identical arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import sparse

from .model import Corpus
from .textnorm import match_key

try:
    from numba import njit, prange

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


class Metric(str, Enum):
    JARO = "jaro"
    JARO_WINKLER = "jw"
    FUZZY_RATIO = "fuzzy"


class PrefixScaleOutOfRangeError(ValueError):
    def __init__(self, prefix_scale: float):
        self.prefix_scale = prefix_scale
        super().__init__(
            f"prefix_scale must be in [0, 0.25], got {prefix_scale!r} "
            "(larger values would allow similarities above 1)"
        )


# ---------------------------------------------------------------------------
# metrics


def jaro(s1: str, s2: str) -> float:
    """Jaro similarity in [0, 1].

    Match window is floor(max(|s1|,|s2|)/2) - 1 (clamped at 0); matches are
    assigned greedily left to right; t is half the count of matched
    characters that disagree in order. Two empty strings compare equal (1.0),
    matching the identity convention of the other metrics.
    """
    len1, len2 = len(s1), len(s2)
    if len1 == 0 and len2 == 0:
        return 1.0
    if len1 == 0 or len2 == 0:
        return 0.0
    window = max(max(len1, len2) // 2 - 1, 0)
    flags1 = [False] * len1
    flags2 = [False] * len2
    m = 0
    for i, ch in enumerate(s1):
        lo = max(0, i - window)
        hi = min(len2 - 1, i + window)
        for j in range(lo, hi + 1):
            if not flags2[j] and s2[j] == ch:
                flags1[i] = True
                flags2[j] = True
                m += 1
                break
    if m == 0:
        return 0.0
    half = 0
    k = 0
    for i in range(len1):
        if flags1[i]:
            while not flags2[k]:
                k += 1
            if s1[i] != s2[k]:
                half += 1
            k += 1
    t = half / 2.0
    return (m / len1 + m / len2 + (m - t) / m) / 3.0


def common_prefix_len(s1: str, s2: str, cap: int = 4) -> int:
    ell = 0
    for a, b in zip(s1[:cap], s2[:cap]):
        if a != b:
            break
        ell += 1
    return ell


def jaro_winkler(s1: str, s2: str, prefix_scale: float = 0.1) -> float:
    """Jaro similarity boosted by the shared prefix (capped at 4 chars).

    sim = jaro + l * prefix_scale * (1 - jaro). The boost applies regardless
    of the base score (no boost-threshold variant), so alternate
    implementations can match bit for bit.
    """
    if not 0.0 <= prefix_scale <= 0.25:
        raise PrefixScaleOutOfRangeError(prefix_scale)
    j = jaro(s1, s2)
    ell = common_prefix_len(s1, s2)
    return j + ell * prefix_scale * (1.0 - j)


def indel_distance(s1: str, s2: str) -> int:
    """Edit distance with insertions and deletions only (no substitutions)."""
    len1, len2 = len(s1), len(s2)
    if len1 == 0:
        return len2
    if len2 == 0:
        return len1
    prev = list(range(len2 + 1))
    for i in range(1, len1 + 1):
        cur = [i] + [0] * len2
        c1 = s1[i - 1]
        for j in range(1, len2 + 1):
            if c1 == s2[j - 1]:
                cur[j] = prev[j - 1]
            else:
                cur[j] = min(prev[j], cur[j - 1]) + 1
        prev = cur
    return prev[len2]


def fuzzy_ratio(s1: str, s2: str) -> float:
    """Normalized indel similarity: 1 - indel(s1,s2)/(|s1|+|s2|).

    1.0 when both strings are empty.
    """
    total = len(s1) + len(s2)
    if total == 0:
        return 1.0
    return 1.0 - indel_distance(s1, s2) / total


_METRIC_FN = {
    Metric.JARO: jaro,
    Metric.JARO_WINKLER: jaro_winkler,
    Metric.FUZZY_RATIO: fuzzy_ratio,
}


def score(s1: str, s2: str, metric: Metric, prefix_scale: float = 0.1) -> float:
    if metric == Metric.JARO_WINKLER:
        return jaro_winkler(s1, s2, prefix_scale)
    return _METRIC_FN[metric](s1, s2)


def fast_score(s1: str, s2: str, metric: Metric, prefix_scale: float = 0.1) -> float:
    """Same value as :func:`score` through the compiled bulk kernel; useful
    for long strings where the pure-Python loop is the bottleneck."""
    if not _HAVE_NUMBA:
        return score(s1, s2, metric, prefix_scale)
    out = _score_index_pairs(
        [s1, s2],
        np.zeros(1, dtype=np.int64),
        np.ones(1, dtype=np.int64),
        Metric(metric),
        prefix_scale,
    )
    return float(out[0])


# ---------------------------------------------------------------------------
# result types


@dataclass(frozen=True)
class SimilarityMatch:
    """Scored pair, ids ordered so id_a < id_b lexicographically."""

    id_a: str
    id_b: str
    score: float
    metric: Metric


@dataclass(frozen=True)
class DuplicateCluster:
    """Transitive closure of matches; representative is the smallest id."""

    member_ids: tuple[str, ...]
    representative_id: str


class UnionFind:
    """Disjoint sets over hashable keys, path compression on find."""

    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        root = self.parent.setdefault(x, x)
        while root != self.parent[root]:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)

    def components(self) -> list[list]:
        groups: dict = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return [sorted(g) for g in groups.values()]


# ---------------------------------------------------------------------------
# blocking


@dataclass
class BlockingIndex:
    """Character n-gram postings over MATCH-normalized dispositifs.

    Documents sharing at least ``min_shared`` distinct n-grams become
    candidate pairs. This is a recall/speed trade: texts shorter than ``n``
    produce no postings and texts can in principle agree on a metric while
    sharing few n-grams, hence the oracle-equivalence test against the
    exhaustive scan.
    """

    n: int = 3
    min_shared: int = 5
    postings: dict[str, set[str]] = field(default_factory=dict)
    keys: dict[str, str] = field(default_factory=dict)  # id -> normalized text


def char_ngrams(text: str, n: int) -> set[str]:
    return {text[i : i + n] for i in range(len(text) - n + 1)}


def build_index(corpus: Corpus, n: int = 3, min_shared: int = 5) -> BlockingIndex:
    if n < 2:
        raise ValueError(f"n-gram size must be >= 2, got {n}")
    index = BlockingIndex(n=n, min_shared=min_shared)
    for a in corpus:
        key = match_key(a.dispositif)
        index.keys[a.id] = key
        for gram in char_ngrams(key, n):
            index.postings.setdefault(gram, set()).add(a.id)
    return index


def _pair_arrays_from_grams(
    doc_grams: list[set[str]], min_shared: int, block: int = 1024
) -> tuple[np.ndarray, np.ndarray]:
    """All index pairs (i < j) of documents sharing >= min_shared distinct
    n-grams, via blocked sparse co-occurrence counting."""
    vocab: dict[str, int] = {}
    rows, cols = [], []
    for i, grams in enumerate(doc_grams):
        for g in grams:
            rows.append(i)
            cols.append(vocab.setdefault(g, len(vocab)))
    n_docs = len(doc_grams)
    if not vocab or n_docs < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    incidence = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int32), (rows, cols)),
        shape=(n_docs, len(vocab)),
    )
    transposed = incidence.T.tocsr()
    ia_parts, ib_parts = [], []
    for r0 in range(0, n_docs, block):
        shared = incidence[r0 : r0 + block] @ transposed
        shared.data[shared.data < min_shared] = 0
        shared.eliminate_zeros()
        coo = shared.tocoo()
        i_global = coo.row.astype(np.int64) + r0
        j_global = coo.col.astype(np.int64)
        upper = j_global > i_global
        ia_parts.append(i_global[upper])
        ib_parts.append(j_global[upper])
    ia = np.concatenate(ia_parts) if ia_parts else np.empty(0, dtype=np.int64)
    ib = np.concatenate(ib_parts) if ib_parts else np.empty(0, dtype=np.int64)
    return ia, ib


def candidate_pairs(index: BlockingIndex) -> list[tuple[str, str]]:
    """Exactly the unordered id pairs sharing >= min_shared distinct n-grams,
    sorted by (id_a, id_b)."""
    ids = sorted(index.keys)
    grams = [char_ngrams(index.keys[i], index.n) for i in ids]
    ia, ib = _pair_arrays_from_grams(grams, index.min_shared)
    pairs = [(ids[i], ids[j]) for i, j in zip(ia.tolist(), ib.tolist())]
    pairs.sort()
    return pairs


# ---------------------------------------------------------------------------
# bulk scoring (numba kernels with pure-Python fallback)

if _HAVE_NUMBA:

    @njit(cache=True)
    def _jaro_pair(codes, o1, len1, o2, len2, prefix_scale, winklerize):
        # Same greedy first-available matching as the pure-Python jaro, but
        # the window scan goes through per-character position buckets with
        # monotone cursors, making the match phase amortized linear. ASCII
        # codepoints get their own bucket; everything >= 127 shares one and
        # re-checks equality.
        if len1 == 0 and len2 == 0:
            return 1.0
        if len1 == 0 or len2 == 0:
            return 0.0
        maxlen = len1 if len1 > len2 else len2
        window = maxlen // 2 - 1
        if window < 0:
            window = 0
        flags1 = np.zeros(len1, dtype=np.uint8)
        flags2 = np.zeros(len2, dtype=np.uint8)

        off = np.zeros(130, dtype=np.int64)
        for j in range(len2):
            c = codes[o2 + j]
            b = c if c < 127 else 127
            off[b + 2] += 1
        for b in range(2, 130):
            off[b] += off[b - 1]
        pos = np.empty(len2, dtype=np.int64)
        for j in range(len2):
            c = codes[o2 + j]
            b = c if c < 127 else 127
            pos[off[b + 1]] = j
            off[b + 1] += 1
        # off[b] now holds the start of bucket b, off[b+1] its end
        cur = off[:128].copy()

        m = 0
        for i in range(len1):
            lo = i - window
            if lo < 0:
                lo = 0
            hi = i + window
            if hi > len2 - 1:
                hi = len2 - 1
            c = codes[o1 + i]
            b = c if c < 127 else 127
            k = cur[b]
            end = off[b + 1]
            while k < end and (pos[k] < lo or flags2[pos[k]] == 1):
                k += 1
            cur[b] = k
            while k < end:
                pj = pos[k]
                if pj > hi:
                    break
                if flags2[pj] == 0 and codes[o2 + pj] == c:
                    flags1[i] = 1
                    flags2[pj] = 1
                    m += 1
                    break
                k += 1
        if m == 0:
            return 0.0
        half = 0
        k = 0
        for i in range(len1):
            if flags1[i] == 1:
                while flags2[k] == 0:
                    k += 1
                if codes[o1 + i] != codes[o2 + k]:
                    half += 1
                k += 1
        t = half / 2.0
        j_sim = (m / len1 + m / len2 + (m - t) / m) / 3.0
        if winklerize:
            cap = 4
            if len1 < cap:
                cap = len1
            if len2 < cap:
                cap = len2
            ell = 0
            for i in range(cap):
                if codes[o1 + i] != codes[o2 + i]:
                    break
                ell += 1
            j_sim = j_sim + ell * prefix_scale * (1.0 - j_sim)
        return j_sim

    @njit(cache=True)
    def _fuzzy_pair(codes, o1, len1, o2, len2):
        total = len1 + len2
        if total == 0:
            return 1.0
        if len1 == 0 or len2 == 0:
            return 0.0  # distance is all insertions, exactly total
        prev = np.empty(len2 + 1, dtype=np.int64)
        cur = np.empty(len2 + 1, dtype=np.int64)
        for j in range(len2 + 1):
            prev[j] = j
        for i in range(1, len1 + 1):
            cur[0] = i
            c1 = codes[o1 + i - 1]
            for j in range(1, len2 + 1):
                if c1 == codes[o2 + j - 1]:
                    cur[j] = prev[j - 1]
                else:
                    d = prev[j] if prev[j] < cur[j - 1] else cur[j - 1]
                    cur[j] = d + 1
            tmp = prev
            prev = cur
            cur = tmp
        return 1.0 - prev[len2] / total

    @njit(cache=True)
    def _indel_banded(codes, o1, len1, o2, len2, dmax):
        # Exact indel distance when it is <= dmax, else any value > dmax.
        # Any path of cost d keeps |i - j| <= d, so a band of half-width
        # dmax contains every optimal path that still matters.
        if len1 == 0 or len2 == 0:
            return len1 + len2
        diff = len1 - len2 if len1 > len2 else len2 - len1
        if diff > dmax:
            return dmax + 1
        cap = dmax + 1
        prev = np.full(len2 + 1, cap, dtype=np.int64)
        cur = np.full(len2 + 1, cap, dtype=np.int64)
        jhi0 = dmax if dmax < len2 else len2
        for j in range(jhi0 + 1):
            prev[j] = j
        for i in range(1, len1 + 1):
            jlo = i - dmax
            if jlo < 1:
                jlo = 1
            jhi = i + dmax
            if jhi > len2:
                jhi = len2
            if jlo - 1 == 0:
                cur[0] = i if i < cap else cap
            else:
                cur[jlo - 1] = cap
            c1 = codes[o1 + i - 1]
            for j in range(jlo, jhi + 1):
                if c1 == codes[o2 + j - 1]:
                    v = prev[j - 1]
                else:
                    a = prev[j]
                    b = cur[j - 1]
                    v = (a if a < b else b) + 1
                    if v > cap:
                        v = cap
                cur[j] = v
            if jhi + 1 <= len2:
                cur[jhi + 1] = cap
            tmp = prev
            prev = cur
            cur = tmp
        return prev[len2]

    @njit(cache=True)
    def _jaro_batch_serial(codes, starts, lens, ia, ib, prefix_scale, winklerize, out):
        for p in range(ia.shape[0]):
            a = ia[p]
            b = ib[p]
            out[p] = _jaro_pair(codes, starts[a], lens[a], starts[b], lens[b],
                                prefix_scale, winklerize)

    @njit(cache=True, parallel=True)
    def _jaro_batch_parallel(codes, starts, lens, ia, ib, prefix_scale, winklerize, out):
        # each out[p] is written independently: thread order cannot change results
        for p in prange(ia.shape[0]):
            a = ia[p]
            b = ib[p]
            out[p] = _jaro_pair(codes, starts[a], lens[a], starts[b], lens[b],
                                prefix_scale, winklerize)

    @njit(cache=True)
    def _fuzzy_one(codes, starts, lens, a, b, threshold):
        len1 = lens[a]
        len2 = lens[b]
        total = len1 + len2
        if threshold < 0.0:
            return _fuzzy_pair(codes, starts[a], len1, starts[b], len2)
        if total == 0:
            return 1.0
        dmax = int((1.0 - threshold) * total + 1e-9)
        d = _indel_banded(codes, starts[a], len1, starts[b], len2, dmax)
        return 1.0 - d / total

    @njit(cache=True)
    def _fuzzy_batch_serial(codes, starts, lens, ia, ib, threshold, out):
        for p in range(ia.shape[0]):
            out[p] = _fuzzy_one(codes, starts, lens, ia[p], ib[p], threshold)

    @njit(cache=True, parallel=True)
    def _fuzzy_batch_parallel(codes, starts, lens, ia, ib, threshold, out):
        for p in prange(ia.shape[0]):
            out[p] = _fuzzy_one(codes, starts, lens, ia[p], ib[p], threshold)

    @njit(cache=True, parallel=True)
    def _minshared_batch(hist, ia, ib, out):
        buckets = hist.shape[1]
        for p in prange(ia.shape[0]):
            a = ia[p]
            b = ib[p]
            acc = 0
            for c in range(buckets):
                ha = hist[a, c]
                hb = hist[b, c]
                acc += ha if ha < hb else hb
            out[p] = acc


def _encode_texts(texts: list[str]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lens = np.array([len(t) for t in texts], dtype=np.int64)
    starts = np.zeros(len(texts), dtype=np.int64)
    if len(texts):
        starts[1:] = np.cumsum(lens)[:-1]
    blob = "".join(texts)
    codes = np.frombuffer(blob.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)
    return codes, starts, lens


def _score_index_pairs(
    texts: list[str],
    ia: np.ndarray,
    ib: np.ndarray,
    metric: Metric,
    prefix_scale: float,
    threshold: float | None = None,
) -> np.ndarray:
    """Exact metric scores for the given index pairs.

    A ``threshold`` only licenses shortcuts for pairs that end up below it
    (banded indel DP); every score at or above the threshold is exact and
    identical to the unthresholded computation.
    """
    out = np.empty(ia.shape[0], dtype=np.float64)
    if ia.shape[0] == 0:
        return out
    if _HAVE_NUMBA:
        codes, starts, lens = _encode_texts(texts)
        # the parallel drivers pay a per-call fork cost; not worth it for
        # small batches
        wide = ia.shape[0] >= 4096
        if metric == Metric.FUZZY_RATIO:
            driver = _fuzzy_batch_parallel if wide else _fuzzy_batch_serial
            driver(codes, starts, lens, ia, ib,
                   -1.0 if threshold is None else threshold, out)
        else:
            driver = _jaro_batch_parallel if wide else _jaro_batch_serial
            driver(
                codes, starts, lens, ia, ib,
                prefix_scale, metric == Metric.JARO_WINKLER, out,
            )
        return out
    for p in range(ia.shape[0]):
        out[p] = score(texts[ia[p]], texts[ib[p]], metric, prefix_scale)
    return out


# ---------------------------------------------------------------------------
# provable score upper bounds used to skip hopeless candidate pairs

_HIST_BUCKETS = 128


def _char_histograms(texts: list[str]) -> np.ndarray:
    hist = np.zeros((len(texts), _HIST_BUCKETS), dtype=np.int64)
    for i, t in enumerate(texts):
        if not t:
            continue
        cp = np.frombuffer(t.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)
        np.add.at(hist[i], np.minimum(cp, _HIST_BUCKETS - 1), 1)
    return hist


def _required_jaro(threshold: float, metric: Metric, prefix_scale: float) -> float:
    if metric == Metric.JARO:
        return threshold
    # jw <= jaro + 4*p*(1 - jaro), so jw >= threshold forces a jaro floor
    boost = 4.0 * prefix_scale
    if boost >= 1.0 or threshold <= boost:
        return 0.0
    return (threshold - boost) / (1.0 - boost)


def _prefilter_mask(
    lens: np.ndarray,
    hist: np.ndarray,
    ia: np.ndarray,
    ib: np.ndarray,
    metric: Metric,
    threshold: float,
    prefix_scale: float,
    chunk: int = 131072,
) -> np.ndarray:
    """True where the pair can still reach the threshold.

    Bounds are provable, never heuristics: matched characters (Jaro) and the
    longest common subsequence (indel) are both at most the bucketed
    character-multiset intersection, and the indel distance is at least the
    length difference.
    """
    l1 = lens[ia].astype(np.float64)
    l2 = lens[ib].astype(np.float64)
    both_empty = (l1 == 0) & (l2 == 0)
    keep = np.zeros(ia.shape[0], dtype=bool)
    keep[both_empty] = True
    live = ~both_empty & (l1 > 0) & (l2 > 0)

    if metric == Metric.FUZZY_RATIO:
        total = l1 + l2
        with np.errstate(divide="ignore", invalid="ignore"):
            len_bound = 1.0 - np.abs(l1 - l2) / total
        live &= len_bound >= threshold
    else:
        j_req = _required_jaro(threshold, metric, prefix_scale)
        ratio = np.minimum(l1, l2) / np.maximum(l1, np.maximum(l2, 1.0))
        live &= (2.0 + ratio) / 3.0 >= j_req

    idx = np.flatnonzero(live)
    if _HAVE_NUMBA:
        shared_all = np.empty(idx.shape[0], dtype=np.int64)
        _minshared_batch(hist, ia[idx], ib[idx], shared_all)
    for c0 in range(0, idx.shape[0], chunk):
        sel = idx[c0 : c0 + chunk]
        if _HAVE_NUMBA:
            shared = shared_all[c0 : c0 + chunk].astype(np.float64)
        else:
            shared = np.minimum(hist[ia[sel]], hist[ib[sel]]).sum(axis=1).astype(np.float64)
        a = l1[sel]
        b = l2[sel]
        if metric == Metric.FUZZY_RATIO:
            ok = 2.0 * shared / (a + b) >= threshold
        else:
            j_req = _required_jaro(threshold, metric, prefix_scale)
            ok = (shared / a + shared / b + 1.0) / 3.0 >= j_req
        keep[sel[ok]] = True
    return keep


# ---------------------------------------------------------------------------
# duplicate research


def find_duplicates(
    corpus: Corpus,
    history: Corpus | None = None,
    threshold: float = 0.95,
    metric: Metric = Metric.JARO_WINKLER,
    n: int = 3,
    min_shared: int = 5,
    prefix_scale: float = 0.1,
    exhaustive: bool = False,
) -> tuple[list[SimilarityMatch], list[DuplicateCluster]]:
    """Score candidate pairs (within the corpus, and corpus x history when a
    history corpus is given) and cluster the matches at or above threshold.

    Blocked mode prunes candidates via the n-gram index plus provable score
    bounds; ``exhaustive=True`` scores every admissible pair and exists as
    the oracle the blocked mode is held to. Output is deterministic: matches
    sorted by (id_a, id_b), clusters by representative.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    metric = Metric(metric)

    docs = list(corpus.amendments)
    n_corpus = len(docs)
    if history is not None:
        docs = docs + list(history.amendments)
    ids = [a.id for a in docs]
    texts = [match_key(a.dispositif) for a in docs]
    n_total = len(docs)

    if exhaustive:
        iu, ju = np.triu_indices(n_total, k=1)
        ia, ib = iu.astype(np.int64), ju.astype(np.int64)
    else:
        grams = [char_ngrams(t, n) for t in texts]
        ia, ib = _pair_arrays_from_grams(grams, min_shared)

    if ia.shape[0]:
        # history-history pairs are out of scope; identical ids are the same
        # record seen through both corpora, not a pair
        in_corpus = np.zeros(n_total, dtype=bool)
        in_corpus[:n_corpus] = True
        mask = in_corpus[ia] | in_corpus[ib]
        ids_arr = np.array(ids)
        mask &= ids_arr[ia] != ids_arr[ib]
        ia, ib = ia[mask], ib[mask]

    if ia.shape[0] and not exhaustive:
        lens = np.array([len(t) for t in texts], dtype=np.int64)
        hist = _char_histograms(texts)
        mask = _prefilter_mask(lens, hist, ia, ib, metric, threshold, prefix_scale)
        ia, ib = ia[mask], ib[mask]

    # canonical orientation: score(text of smaller id, text of larger id)
    if ia.shape[0]:
        ids_arr = np.array(ids)
        swap = ids_arr[ia] > ids_arr[ib]
        ia, ib = np.where(swap, ib, ia), np.where(swap, ia, ib)

    scores = _score_index_pairs(texts, ia, ib, metric, prefix_scale, threshold=threshold)

    matches = []
    hit = np.flatnonzero(scores >= threshold)
    for p in hit.tolist():
        matches.append(
            SimilarityMatch(
                id_a=ids[ia[p]], id_b=ids[ib[p]],
                score=float(scores[p]), metric=metric,
            )
        )
    matches.sort(key=lambda m: (m.id_a, m.id_b))

    uf = UnionFind()
    for m in matches:
        uf.union(m.id_a, m.id_b)
    clusters = [
        DuplicateCluster(member_ids=tuple(members), representative_id=members[0])
        for members in uf.components()
        if len(members) >= 2
    ]
    clusters.sort(key=lambda c: c.representative_id)
    return matches, clusters


def duplicate_rate(clusters: list[DuplicateCluster], corpus_size: int) -> float:
    """Fraction of amendments that have an existing counterpart: cluster
    members beyond each cluster's representative."""
    if corpus_size == 0:
        return 0.0
    extra = sum(len(c.member_ids) - 1 for c in clusters)
    return extra / corpus_size
