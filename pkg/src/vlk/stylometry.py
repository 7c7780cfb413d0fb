"""Character/token/sequence similarity triple for vendor writing-style checks.

Two ads are compared with Damerau-Levenshtein (character level), Jaccard over
whitespace tokens (token level), and Ratcliff-Obershelp (sequence level); the
overall pair similarity is the plain mean of the three. Vendor-level numbers
aggregate pair means within one ad list or across two.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence


def damerau_levenshtein(a: str, b: str) -> int:
    """Unrestricted Damerau-Levenshtein distance over Unicode scalar values.

    Edits are insert, delete, substitute, and adjacent transposition, with no
    restriction on editing transposed characters again (Lowrance-Wagner).
    """
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    # d has a sentinel row/column at index 0 holding the max distance bound.
    maxdist = la + lb
    d = [[0] * (lb + 2) for _ in range(la + 2)]
    d[0][0] = maxdist
    for i in range(la + 1):
        d[i + 1][0] = maxdist
        d[i + 1][1] = i
    for j in range(lb + 1):
        d[0][j + 1] = maxdist
        d[1][j + 1] = j
    last_row: dict[str, int] = {}
    for i in range(1, la + 1):
        last_col = 0
        for j in range(1, lb + 1):
            i_prev = last_row.get(b[j - 1], 0)
            j_prev = last_col
            if a[i - 1] == b[j - 1]:
                cost = 0
                last_col = j
            else:
                cost = 1
            d[i + 1][j + 1] = min(
                d[i][j] + cost,          # substitute / match
                d[i + 1][j] + 1,         # insert
                d[i][j + 1] + 1,         # delete
                # transpose a[i_prev-1]..a[i-1] with everything between deleted
                d[i_prev][j_prev] + (i - i_prev - 1) + 1 + (j - j_prev - 1),
            )
        last_row[a[i - 1]] = i
    return d[la + 1][lb + 1]


def jaccard_tokens(a: str, b: str, lowercase: bool = False) -> float:
    """Jaccard index over whitespace-split token sets; 1 when both are empty."""
    if lowercase:
        a, b = a.lower(), b.lower()
    ta, tb = set(a.split()), set(b.split())
    if not ta and not tb:
        return 1.0
    return len(ta & tb) / len(ta | tb)


def _matching_chars(a: str, b: str) -> int:
    """Total matched characters of the recursive longest-common-substring split.

    The longest common substring is found first (ties: smallest start in a,
    then in b), then both flanks are matched recursively.
    """
    if not a or not b:
        return 0
    best_len = 0
    best_i = best_j = 0
    # classic O(|a|*|b|) suffix table, row-compressed
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        ca = a[i - 1]
        for j in range(1, len(b) + 1):
            if ca == b[j - 1]:
                length = prev[j - 1] + 1
                cur[j] = length
                if length > best_len:
                    best_len = length
                    best_i, best_j = i - length, j - length
                elif length == best_len and best_len:
                    i0, j0 = i - length, j - length
                    if (i0, j0) < (best_i, best_j):
                        best_i, best_j = i0, j0
        prev = cur
    if best_len == 0:
        return 0
    return (
        best_len
        + _matching_chars(a[:best_i], b[:best_j])
        + _matching_chars(a[best_i + best_len:], b[best_j + best_len:])
    )


def ratcliff_obershelp(a: str, b: str) -> float:
    """Ratcliff-Obershelp similarity 2M/(|a|+|b|); 1 when both are empty."""
    if not a and not b:
        return 1.0
    return 2.0 * _matching_chars(a, b) / (len(a) + len(b))


@dataclass(frozen=True)
class PairSimilarity:
    levenshtein_sim: float
    jaccard_sim: float
    obershelp_sim: float
    mean: float


def pair_similarity(a: str, b: str, lowercase_tokens: bool = False) -> PairSimilarity:
    """Similarity triple between two ad texts plus their arithmetic mean.

    The Damerau-Levenshtein distance is normalized by max(|a|, |b|, 1) so the
    character-level score stays in [0, 1]. Token sets are compared as written;
    pass ``lowercase_tokens=True`` to fold case before the Jaccard index
    (casing is normally kept because it is itself a stylistic signal).
    """
    lev = 1.0 - damerau_levenshtein(a, b) / max(len(a), len(b), 1)
    jac = jaccard_tokens(a, b, lowercase=lowercase_tokens)
    obe = ratcliff_obershelp(a, b)
    return PairSimilarity(lev, jac, obe, (lev + jac + obe) / 3.0)


def vendor_within_similarity(ads: Sequence[str], lowercase_tokens: bool = False) -> float:
    """Mean pair similarity over all unordered distinct pairs of one vendor's ads."""
    if len(ads) < 2:
        raise ValueError("within-vendor similarity needs at least two ads")
    total = 0.0
    count = 0
    for x, y in combinations(ads, 2):
        total += pair_similarity(x, y, lowercase_tokens).mean
        count += 1
    return total / count


def vendor_across_similarity(
    ads_a: Sequence[str], ads_b: Sequence[str], lowercase_tokens: bool = False
) -> float:
    """Mean pair similarity over all cross pairs of one vendor's ads in two markets.

    Pairs whose two texts are identical are skipped: ads are identified by
    their text here, so equal strings on both sides count as the same ad.
    """
    if not ads_a or not ads_b:
        raise ValueError("across-market similarity needs ads on both sides")
    total = 0.0
    count = 0
    for x in ads_a:
        for y in ads_b:
            if x == y:
                continue
            total += pair_similarity(x, y, lowercase_tokens).mean
            count += 1
    if count == 0:
        raise ValueError("no distinct cross pairs")
    return total / count
