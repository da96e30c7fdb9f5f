import random

import pytest

from humeval.alignment import (AlignmentConfig, align_ground_truth,
                               filter_laughter)
from humeval.corpus import LaughterEvent, Sentence, Transcript
from humeval.errors import TimelineError


def timed_transcript(spans, tid="t"):
    sentences = tuple(
        Sentence(index=i, text=f"sentence {i}", start_s=a, end_s=b)
        for i, (a, b) in enumerate(spans))
    return Transcript(id=tid, raw_text=" ".join(s.text for s in sentences),
                      sentences=sentences)


def laugh(onset, duration=1.0, p=0.9):
    return LaughterEvent(onset, onset + duration, p)


class TestFilterLaughter:
    def test_too_short_dropped(self):
        assert filter_laughter([LaughterEvent(0.0, 0.15, 0.9)]) == []

    def test_low_probability_dropped(self):
        assert filter_laughter([LaughterEvent(0.0, 0.5, 0.4)]) == []

    def test_boundary_values_kept(self):
        e = LaughterEvent(0.0, 0.2, 0.5)  # thresholds are inclusive
        assert filter_laughter([e]) == [e]

    def test_defaults(self):
        cfg = AlignmentConfig()
        assert cfg.min_laughter_s == 0.2
        assert cfg.min_probability == 0.5

    def test_order_preserved(self):
        events = [laugh(3.0), laugh(1.0), laugh(2.0)]
        assert filter_laughter(events) == events


class TestAlignGroundTruth:
    def test_onset_inside_sentence(self):
        t = timed_transcript([(0, 5), (5, 10)])
        gt = align_ground_truth(t, [laugh(5.5)])
        assert gt.quotes == ("sentence 1",)

    def test_onset_in_gap_goes_to_previous(self):
        t = timed_transcript([(0, 5), (6, 10)])
        gt = align_ground_truth(t, [laugh(5.4)])
        assert gt.quotes == ("sentence 0",)

    def test_onset_beyond_lag_dropped(self):
        t = timed_transcript([(0, 5), (6, 10)])
        gt = align_ground_truth(t, [laugh(30.0)])
        assert gt.quotes == ()

    def test_deduplicated_in_timeline_order(self):
        t = timed_transcript([(0, 5), (6, 10), (11, 15)])
        gt = align_ground_truth(t, [laugh(12.0), laugh(1.0), laugh(2.0)])
        assert gt.quotes == ("sentence 0", "sentence 2")
        assert gt.source == "ground_truth"

    def test_strict_preceding_flag(self):
        t = timed_transcript([(0, 5), (5, 10)])
        cfg = AlignmentConfig(strict_preceding=True)
        gt = align_ground_truth(t, [laugh(5.5)], cfg)
        assert gt.quotes == ("sentence 0",)

    def test_missing_timings_rejected(self):
        t = Transcript(id="t", raw_text="x",
                       sentences=(Sentence(0, "x"),))
        with pytest.raises(TimelineError):
            align_ground_truth(t, [laugh(1.0)])

    def test_time_shift_invariance(self, rng):
        for _ in range(50):
            spans, cursor = [], 0.0
            for _ in range(rng.randrange(2, 6)):
                cursor += rng.uniform(0.0, 2.0)
                end = cursor + rng.uniform(0.5, 5.0)
                spans.append((cursor, end))
                cursor = end
            events = [laugh(rng.uniform(0, cursor + 5)) for _ in range(4)]
            shift = rng.uniform(1, 100)
            base = align_ground_truth(timed_transcript(spans), events)
            shifted = align_ground_truth(
                timed_transcript([(a + shift, b + shift) for a, b in spans]),
                [LaughterEvent(e.onset_s + shift, e.offset_s + shift,
                               e.probability) for e in events])
            assert base.quotes == shifted.quotes

    def test_tightening_filters_never_adds_quotes(self, rng):
        for _ in range(200):
            spans, cursor = [], 0.0
            for _ in range(rng.randrange(1, 6)):
                cursor += rng.uniform(0.0, 1.5)
                end = cursor + rng.uniform(0.3, 4.0)
                spans.append((cursor, end))
                cursor = end
            t = timed_transcript(spans)
            events = [
                LaughterEvent(onset := rng.uniform(0, cursor + 4),
                              onset + rng.uniform(0.05, 2.0),
                              rng.random())
                for _ in range(rng.randrange(0, 6))
            ]
            loose = AlignmentConfig(min_laughter_s=0.1, min_probability=0.2)
            tight = AlignmentConfig(min_laughter_s=0.5, min_probability=0.7)
            loose_q = align_ground_truth(t, filter_laughter(events, loose), loose)
            tight_q = align_ground_truth(t, filter_laughter(events, tight), tight)
            assert set(tight_q.quotes) <= set(loose_q.quotes)

    def test_output_subset_of_sentences(self, rng):
        t = timed_transcript([(0, 2), (3, 5), (6, 8)])
        for _ in range(50):
            events = [laugh(rng.uniform(0, 12)) for _ in range(3)]
            gt = align_ground_truth(t, events)
            texts = [s.text for s in t.sentences]
            assert list(gt.quotes) == [x for x in texts if x in gt.quotes]
