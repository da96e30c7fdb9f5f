import random
import string

import pytest

from humeval.fuzzy import FuzzyConfig, fuzzy_similarity, levenshtein_distance
from oracles import levenshtein_full_table

RAW = FuzzyConfig(normalize_inputs=False)


def random_string(rng, max_len=64, alphabet=string.ascii_lowercase + "äöü💬 "):
    return "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, max_len + 1)))


class TestLevenshtein:
    def test_kitten_sitting(self):
        assert levenshtein_distance("kitten", "sitting") == 3
        assert levenshtein_full_table("kitten", "sitting") == 3

    def test_identity(self):
        assert levenshtein_distance("abc", "abc") == 0

    def test_pure_insertion(self):
        assert levenshtein_distance("", "abc") == 3

    def test_unicode_counts_scalars(self):
        # one substitution regardless of UTF-8 byte width
        assert levenshtein_distance("café", "cafe") == 1
        assert levenshtein_distance("💬", "x") == 1

    def test_matches_full_table_oracle(self, rng):
        for _ in range(1000):
            a, b = random_string(rng), random_string(rng)
            assert levenshtein_distance(a, b) == levenshtein_full_table(a, b)

    def test_triangle_inequality(self, rng):
        for _ in range(300):
            a, b, c = (random_string(rng, 20) for _ in range(3))
            assert levenshtein_distance(a, c) <= (
                levenshtein_distance(a, b) + levenshtein_distance(b, c))


class TestFuzzySimilarity:
    def test_kitten_sitting_value(self):
        assert fuzzy_similarity("kitten", "sitting", RAW) == pytest.approx(1 - 3 / 7)

    def test_identical(self):
        assert fuzzy_similarity("same text", "same text") == 1.0

    def test_totally_different(self):
        assert fuzzy_similarity("", "abc", RAW) == 0.0

    def test_both_empty(self):
        assert fuzzy_similarity("", "", RAW) == 1.0

    def test_symmetry(self, rng):
        for _ in range(300):
            a, b = random_string(rng, 30), random_string(rng, 30)
            assert fuzzy_similarity(a, b, RAW) == fuzzy_similarity(b, a, RAW)

    def test_range(self, rng):
        for _ in range(300):
            v = fuzzy_similarity(random_string(rng, 30), random_string(rng, 30), RAW)
            assert 0.0 <= v <= 1.0

    def test_normalization_config(self):
        assert fuzzy_similarity("Hello  World", "hello world") == 1.0
        assert fuzzy_similarity("Hello  World", "hello world", RAW) < 1.0
