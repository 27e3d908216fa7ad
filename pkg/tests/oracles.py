"""Independent brute-force references the metric implementations are held to.

Deliberately naive: the Jaro reference walks the definition with explicit
loops and a first-available assignment, the indel reference is the textbook
recursion (memoized per call so the suite stays fast; caching changes no
value). Nothing here imports the production similarity code.
"""

from __future__ import annotations


def jaro_reference(s1: str, s2: str) -> float:
    len1, len2 = len(s1), len(s2)
    if len1 == 0 and len2 == 0:
        return 1.0
    if len1 == 0 or len2 == 0:
        return 0.0
    window = (max(len1, len2) // 2) - 1
    if window < 0:
        window = 0

    assigned_in_s2 = [False] * len2
    matched1 = []  # matched characters of s1, in s1 order
    matched_js = []  # which s2 index each one claimed
    for i in range(len1):
        for j in range(len2):
            if abs(i - j) <= window and not assigned_in_s2[j] and s1[i] == s2[j]:
                assigned_in_s2[j] = True
                matched1.append(s1[i])
                matched_js.append(j)
                break
    m = len(matched1)
    if m == 0:
        return 0.0
    matched2 = [s2[j] for j in sorted(matched_js)]
    out_of_order = sum(1 for a, b in zip(matched1, matched2) if a != b)
    t = out_of_order / 2.0
    return (m / len1 + m / len2 + (m - t) / m) / 3.0


def jaro_winkler_reference(s1: str, s2: str, prefix_scale: float = 0.1) -> float:
    j = jaro_reference(s1, s2)
    ell = 0
    for a, b in zip(s1[:4], s2[:4]):
        if a != b:
            break
        ell += 1
    return j + ell * prefix_scale * (1.0 - j)


def indel_reference(s1: str, s2: str) -> int:
    """Insert/delete-only edit distance by exhaustive recursion."""
    memo: dict[tuple[int, int], int] = {}

    def rec(i: int, j: int) -> int:
        if i == len(s1):
            return len(s2) - j
        if j == len(s2):
            return len(s1) - i
        key = (i, j)
        if key in memo:
            return memo[key]
        if s1[i] == s2[j]:
            best = rec(i + 1, j + 1)
        else:
            best = 1 + min(rec(i + 1, j), rec(i, j + 1))
        memo[key] = best
        return best

    return rec(0, 0)


def fuzzy_ratio_reference(s1: str, s2: str) -> float:
    total = len(s1) + len(s2)
    if total == 0:
        return 1.0
    return 1.0 - indel_reference(s1, s2) / total
