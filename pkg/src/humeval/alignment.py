"""Ground-truth derivation: attribute laughter events to transcript sentences."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .corpus import LaughterEvent, QuoteSet, Transcript
from .errors import TimelineError

log = logging.getLogger(__name__)

DEFAULT_MIN_LAUGHTER_S = 0.2
DEFAULT_MIN_PROBABILITY = 0.5
DEFAULT_MAX_LAG_S = 3.0


@dataclass(frozen=True)
class AlignmentConfig:
    min_laughter_s: float = DEFAULT_MIN_LAUGHTER_S
    min_probability: float = DEFAULT_MIN_PROBABILITY
    max_lag_s: float = DEFAULT_MAX_LAG_S
    strict_preceding: bool = False  # skip the containment rule when set


def filter_laughter(events, cfg: AlignmentConfig = AlignmentConfig()):
    """Keep events meeting the minimum duration and probability (inclusive)."""
    return [
        e for e in events
        if e.duration >= cfg.min_laughter_s and e.probability >= cfg.min_probability
    ]


def align_ground_truth(transcript: Transcript, events,
                       cfg: AlignmentConfig = AlignmentConfig()) -> QuoteSet:
    """Attribute each laughter event to the sentence that triggered it.

    An event is attributed to the sentence whose span contains the onset
    (laughter may begin before the sentence finishes); failing that, to the
    latest sentence that ended at most ``max_lag_s`` before the onset.
    Unattributable events are dropped with a warning. The result is the
    deduplicated, index-ordered list of attributed sentence texts.
    """
    if not transcript.sentences or not transcript.has_timings:
        raise TimelineError(
            f"transcript {transcript.id!r} has no usable sentence timings"
        )
    hit = [False] * len(transcript.sentences)
    for event in events:
        idx = _attribute(transcript, event.onset_s, cfg)
        if idx is None:
            log.warning(
                "transcript %s: laughter at %.2fs not attributable to any sentence",
                transcript.id, event.onset_s,
            )
        else:
            hit[idx] = True
    quotes = tuple(
        s.text for s, flagged in zip(transcript.sentences, hit) if flagged
    )
    return QuoteSet(transcript_id=transcript.id, source="ground_truth", quotes=quotes)


def _attribute(transcript: Transcript, onset: float, cfg: AlignmentConfig):
    if not cfg.strict_preceding:
        for s in transcript.sentences:
            if s.start_s <= onset <= s.end_s:
                return s.index
    best = None
    for s in transcript.sentences:
        if s.end_s <= onset and onset - s.end_s <= cfg.max_lag_s:
            if best is None or s.end_s > transcript.sentences[best].end_s:
                best = s.index
    return best
