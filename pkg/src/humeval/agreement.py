"""Percentage Agreement among raters and between rater consensus and models."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .corpus import QuoteSet, Transcript
from .errors import ContractError
from .fuzzy import FuzzyConfig, fuzzy_similarity

DEFAULT_MATCH_THRESHOLD = 0.8


@dataclass(frozen=True)
class LabelMatrix:
    rater_ids: tuple[str, ...]
    rows: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        lengths = {len(r) for r in self.rows}
        if len(lengths) > 1:
            raise ContractError(f"label rows have differing lengths: {sorted(lengths)}")
        if len(self.rater_ids) != len(self.rows):
            raise ContractError("rater_ids and rows are not parallel")


def pairwise_pa(a, b) -> float:
    """Fraction of positions where two binary label vectors agree."""
    if len(a) != len(b):
        raise ContractError(f"label length mismatch: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ContractError("cannot compute agreement over zero positions")
    return sum(x == y for x, y in zip(a, b)) / len(a)


def group_pa(matrix: LabelMatrix) -> float:
    """Mean pairwise agreement over all unordered rater pairs."""
    if len(matrix.rows) < 2:
        raise ContractError("group agreement needs at least 2 raters")
    pairs = list(combinations(matrix.rows, 2))
    return sum(pairwise_pa(a, b) for a, b in pairs) / len(pairs)


def majority_labels(matrix: LabelMatrix) -> tuple[bool, ...]:
    """Strict-majority consensus; exact ties resolve to False."""
    if not matrix.rows:
        raise ContractError("majority vote needs at least 1 rater")
    n = len(matrix.rows)
    return tuple(
        sum(row[i] for row in matrix.rows) * 2 > n
        for i in range(len(matrix.rows[0]))
    )


def model_labels_from_quotes(M: QuoteSet, transcript: Transcript,
                             match_threshold: float = DEFAULT_MATCH_THRESHOLD,
                             cfg: FuzzyConfig = FuzzyConfig()) -> tuple[bool, ...]:
    """Project a free-text quote list onto per-sentence binary labels.

    Sentence i is labeled funny iff some quote reaches the fuzzy similarity
    threshold against the sentence text.
    """
    if not 0.0 < match_threshold <= 1.0:
        raise ContractError(f"match_threshold {match_threshold} outside (0, 1]")
    labels = []
    for s in transcript.sentences:
        labels.append(any(
            fuzzy_similarity(q, s.text, cfg) >= match_threshold for q in M.quotes
        ))
    return tuple(labels)
