"""Data model and JSONL file formats for transcripts, predictions, laughter and rater labels."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import CorpusParseError, ValidationError

_QUOTE_MAP = str.maketrans({
    "‘": "'", "’": "'", "‚": "'", "‛": "'",
    "“": '"', "”": '"', "„": '"', "‟": '"',
    "′": "'", "″": '"',
})

_ENUM_RE = re.compile(r"^\s*(?:\d+\s*[.)]\s*|[-*•]\s+)")
_WS_RE = re.compile(r"\s+")


def normalize_text(s: str) -> str:
    """Casefold, fold typographic quotes to ASCII, collapse whitespace."""
    s = s.translate(_QUOTE_MAP).casefold()
    return _WS_RE.sub(" ", s).strip()


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    start_s: float | None = None
    end_s: float | None = None

    @property
    def has_timing(self) -> bool:
        return self.start_s is not None and self.end_s is not None


@dataclass(frozen=True)
class Transcript:
    id: str
    raw_text: str
    sentences: tuple[Sentence, ...]
    comedian: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValidationError("transcript id must be non-empty")
        _validate_sentences(self.id, self.sentences)

    @property
    def has_timings(self) -> bool:
        return all(s.has_timing for s in self.sentences)


def _validate_sentences(tid: str, sentences: tuple[Sentence, ...]) -> None:
    prev = None
    for s in sentences:
        if s.has_timing:
            if s.start_s < 0 or s.start_s > s.end_s:
                raise ValidationError(
                    f"transcript {tid!r}: sentence {s.index} has invalid timing "
                    f"[{s.start_s}, {s.end_s}]"
                )
            if prev is not None and prev.has_timing:
                if s.start_s < prev.start_s or s.start_s < prev.end_s:
                    raise ValidationError(
                        f"transcript {tid!r}: sentences {prev.index} and {s.index} "
                        f"overlap or are out of order "
                        f"({prev.end_s} > {s.start_s})"
                    )
        prev = s


@dataclass(frozen=True)
class QuoteSet:
    transcript_id: str
    source: str  # "model" | "ground_truth" | "human_rater"
    quotes: tuple[str, ...]
    variation_id: str | None = None

    def __post_init__(self):
        for q in self.quotes:
            if not normalize_text(q):
                raise ValidationError(
                    f"quote set for {self.transcript_id!r} contains an empty quote"
                )


@dataclass(frozen=True)
class LaughterEvent:
    onset_s: float
    offset_s: float
    probability: float

    def __post_init__(self):
        if not self.onset_s < self.offset_s:
            raise ValidationError(
                f"laughter event has non-positive duration "
                f"[{self.onset_s}, {self.offset_s}]"
            )
        if not 0.0 <= self.probability <= 1.0:
            raise ValidationError(
                f"laughter probability {self.probability} outside [0, 1]"
            )

    @property
    def duration(self) -> float:
        return self.offset_s - self.onset_s


@dataclass(frozen=True)
class RaterLabels:
    rater_id: str
    transcript_id: str
    labels: tuple[bool, ...]


def parse_quote_list(raw_llm_output: str, transcript_id: str = "",
                     source: str = "model") -> QuoteSet:
    """Parse raw LLM output text into an ordered quote list.

    Splits on line boundaries, strips enumeration markers (``1.``, ``2)``),
    bullets and surrounding quotation marks, and drops empty lines.
    Non-compliant lines (explanations, commentary) are kept as quotes.
    """
    quotes = []
    for line in raw_llm_output.splitlines():
        line = _ENUM_RE.sub("", line).strip()
        line = _strip_surrounding_quotes(line)
        if line:
            quotes.append(line)
    return QuoteSet(transcript_id=transcript_id, source=source, quotes=tuple(quotes))


def _strip_surrounding_quotes(s: str) -> str:
    pairs = {'"': '"', "'": "'", "“": "”", "‘": "’"}
    while len(s) >= 2 and s[0] in pairs and s[-1] == pairs[s[0]]:
        s = s[1:-1].strip()
    return s


# --- JSONL I/O -------------------------------------------------------------

def _iter_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusParseError(path, lineno, f"malformed JSON: {exc}") from exc


def load_corpus(path) -> list[Transcript]:
    """Load transcripts from a JSONL file, one transcript object per line."""
    transcripts = []
    seen = set()
    for lineno, obj in _iter_jsonl(path):
        try:
            t = transcript_from_dict(obj)
        except (KeyError, TypeError) as exc:
            raise CorpusParseError(path, lineno, f"missing/invalid field: {exc}") from exc
        if t.id in seen:
            raise ValidationError(f"duplicate transcript id {t.id!r} in {path}")
        seen.add(t.id)
        transcripts.append(t)
    return transcripts


def transcript_from_dict(obj: dict) -> Transcript:
    sentences = tuple(
        Sentence(
            index=s["index"],
            text=s["text"],
            start_s=s.get("start_s"),
            end_s=s.get("end_s"),
        )
        for s in obj["sentences"]
    )
    return Transcript(
        id=obj["id"],
        comedian=obj.get("comedian"),
        raw_text=obj["raw_text"],
        sentences=sentences,
    )


def transcript_to_dict(t: Transcript) -> dict:
    out = {"id": t.id, "raw_text": t.raw_text, "sentences": []}
    if t.comedian is not None:
        out["comedian"] = t.comedian
    for s in t.sentences:
        d = {"index": s.index, "text": s.text}
        if s.start_s is not None:
            d["start_s"] = s.start_s
        if s.end_s is not None:
            d["end_s"] = s.end_s
        out["sentences"].append(d)
    return out


def save_corpus(transcripts, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in transcripts:
            fh.write(json.dumps(transcript_to_dict(t), ensure_ascii=False) + "\n")


def load_quote_sets(path) -> list[QuoteSet]:
    """Load predictions/ground-truth JSONL (one QuoteSet per line)."""
    out = []
    for lineno, obj in _iter_jsonl(path):
        try:
            out.append(QuoteSet(
                transcript_id=obj["transcript_id"],
                source=obj.get("source", "model"),
                quotes=tuple(obj["quotes"]),
                variation_id=obj.get("variation_id"),
            ))
        except (KeyError, TypeError) as exc:
            raise CorpusParseError(path, lineno, f"missing/invalid field: {exc}") from exc
    return out


def save_quote_sets(quote_sets, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for qs in quote_sets:
            obj = {
                "transcript_id": qs.transcript_id,
                "source": qs.source,
                "quotes": list(qs.quotes),
            }
            if qs.variation_id is not None:
                obj["variation_id"] = qs.variation_id
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_laughter(path) -> dict[str, list[LaughterEvent]]:
    """Load laughter JSONL: {"transcript_id": ..., "events": [...]}."""
    out: dict[str, list[LaughterEvent]] = {}
    for lineno, obj in _iter_jsonl(path):
        try:
            events = [
                LaughterEvent(e["onset_s"], e["offset_s"], e["probability"])
                for e in obj["events"]
            ]
            out.setdefault(obj["transcript_id"], []).extend(events)
        except (KeyError, TypeError) as exc:
            raise CorpusParseError(path, lineno, f"missing/invalid field: {exc}") from exc
    return out


def load_rater_labels(path) -> list[RaterLabels]:
    out = []
    for lineno, obj in _iter_jsonl(path):
        try:
            out.append(RaterLabels(
                rater_id=obj["rater_id"],
                transcript_id=obj["transcript_id"],
                labels=tuple(bool(x) for x in obj["labels"]),
            ))
        except (KeyError, TypeError) as exc:
            raise CorpusParseError(path, lineno, f"missing/invalid field: {exc}") from exc
    return out
