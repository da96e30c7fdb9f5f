"""Fuzzy string similarity based on Levenshtein distance."""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import normalize_text
from .scoring import DEFAULT_ALPHA


@dataclass(frozen=True)
class FuzzyConfig:
    normalize_inputs: bool = True
    alpha: float = DEFAULT_ALPHA


def levenshtein_distance(a: str, b: str) -> int:
    """Minimum single-character edits (insert/delete/substitute) from a to b.

    Operates on Unicode scalar values; two-row DP, O(len(a)*len(b)).
    """
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(
                prev[j] + 1,          # delete from a
                cur[j - 1] + 1,       # insert into a
                prev[j - 1] + (ca != cb),
            ))
        prev = cur
    return prev[-1]


def fuzzy_similarity(a: str, b: str, cfg: FuzzyConfig = FuzzyConfig()) -> float:
    """1 − d/max(len) similarity in [0, 1]; 1.0 when both strings are empty."""
    if cfg.normalize_inputs:
        a, b = normalize_text(a), normalize_text(b)
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / longest
