"""Humor-detection evaluation toolkit.

Scores predicted humorous quotes against laughter-derived ground truth with
three interchangeable modules: fuzzy string matching, sentence-embedding
similarity, and subspace similarity. Also covers ground-truth alignment
from laughter timestamps and inter-rater agreement analysis.
"""

__version__ = "0.1.0"

from .corpus import (LaughterEvent, QuoteSet, RaterLabels, Sentence, Transcript,
                     load_corpus, normalize_text, parse_quote_list)
from .fuzzy import FuzzyConfig, fuzzy_similarity, levenshtein_distance
from .scoring import MatchResult, score_quote_sets
from .subspace import canonical_angles, pca_basis, subspace_score

__all__ = [
    "LaughterEvent", "QuoteSet", "RaterLabels", "Sentence", "Transcript",
    "load_corpus", "normalize_text", "parse_quote_list",
    "FuzzyConfig", "fuzzy_similarity", "levenshtein_distance",
    "MatchResult", "score_quote_sets",
    "canonical_angles", "pca_basis", "subspace_score",
    "__version__",
]
