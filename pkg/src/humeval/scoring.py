"""Shared scoring engine: similarity matrix, best matches, penalty, final score.

Parametrized by a pluggable pairwise similarity function so the fuzzy and
embedding modules reuse one code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .corpus import QuoteSet
from .errors import ContractError, UnscorableError

SimilarityFn = Callable[[str, str], float]

DEFAULT_ALPHA = 0.1


@dataclass(frozen=True)
class MatchResult:
    best_per_ground_truth: tuple[float, ...]
    penalty_count: int
    alpha: float
    final_score: float


def build_similarity_matrix(M: QuoteSet, G: QuoteSet, sim: SimilarityFn) -> np.ndarray:
    """n×k matrix of pairwise similarities, rows = model quotes, cols = ground truth."""
    n, k = len(M.quotes), len(G.quotes)
    S = np.zeros((n, k))
    for i, m in enumerate(M.quotes):
        for j, g in enumerate(G.quotes):
            v = sim(m, g)
            if not math.isfinite(v) or not 0.0 <= v <= 1.0:
                raise ContractError(
                    f"similarity function returned {v!r} for pair ({m!r}, {g!r}); "
                    f"expected a finite value in [0, 1]"
                )
            S[i, j] = v
    return S


def best_matches(S: np.ndarray) -> list[float]:
    """Column-wise maxima; a ground truth with no model outputs scores 0."""
    n, k = S.shape
    if n == 0:
        return [0.0] * k
    return S.max(axis=0).tolist()


def overgeneration_penalty(n: int, k: int) -> int:
    """Penalty count when predictions outnumber ground truths."""
    return max(n - k, 0)


def final_score(t, p: int, alpha: float) -> float:
    """Mean best-match score minus the scaled penalty, clamped to [0, 1]."""
    k = len(t)
    if k == 0:
        raise UnscorableError("cannot score a transcript with no ground truth (k = 0)")
    raw = sum(t) / k - alpha * p
    return min(max(raw, 0.0), 1.0)


def score_quote_sets(M: QuoteSet, G: QuoteSet, sim: SimilarityFn,
                     alpha: float = DEFAULT_ALPHA,
                     match_threshold: float | None = None) -> MatchResult:
    """Full scoring pipeline for one transcript.

    ``match_threshold``, when set, zeroes best matches below it before
    averaging. Off by default.
    """
    S = build_similarity_matrix(M, G, sim)
    t = best_matches(S)
    if match_threshold is not None:
        t = [v if v >= match_threshold else 0.0 for v in t]
    p = overgeneration_penalty(len(M.quotes), len(G.quotes))
    score = final_score(t, p, alpha)
    return MatchResult(
        best_per_ground_truth=tuple(t),
        penalty_count=p,
        alpha=alpha,
        final_score=score,
    )
