from fractions import Fraction

import numpy as np
import pytest

from errors import (
    DemandExceedsMeasureError,
    InvalidIntervalError,
    MalformedRationalError,
    NonpositivePartError,
    PartitionSumMismatchError,
)
from measure import IntervalSet, carve, format_rational, measure, parse_rational, partition, set_algebra

from conftest import S


def random_set(rng, denom=8, span=24):
    pairs = []
    for _ in range(int(rng.integers(1, 5))):
        lo = int(rng.integers(0, span))
        pairs.append((Fraction(lo, denom), Fraction(lo + int(rng.integers(1, 6)), denom)))
    return IntervalSet.of(*pairs)


def grid_points(denom=8, span=30):
    """Grid points and cell midpoints; membership is constant on each half-open cell"""
    return [Fraction(i, 2 * denom) for i in range(2 * span)]


class TestRationals:
    def test_parse_forms(self):
        assert parse_rational("3/5") == Fraction(3, 5)
        assert parse_rational("7") == 7
        assert parse_rational("-1/2") == Fraction(-1, 2)
        assert parse_rational(4) == 4

    @pytest.mark.parametrize("text", ["0.5", "1/0", "a/b", "", "1/-2", 0.5, True])
    def test_malformed(self, text):
        with pytest.raises(MalformedRationalError):
            parse_rational(text)

    def test_format(self):
        assert format_rational(Fraction(6, 4)) == "3/2"
        assert format_rational(Fraction(2)) == "2"


class TestIntervalSet:
    def test_empty_interval_rejected(self):
        with pytest.raises(InvalidIntervalError):
            S((1, 1))

    def test_normal_form_merges_overlap_and_adjacency(self):
        s = S((2, 3), (0, 1), ("1/2", "3/2"), (3, 4))
        assert s.to_pairs() == [(0, Fraction(3, 2)), (2, 4)]

    def test_measure_examples(self):
        assert measure(IntervalSet.empty()) == 0
        assert measure(S((0, 1))) == 1
        assert measure(S((0, "1/3"), ("1/2", 1))) == Fraction(5, 6)

    def test_set_algebra_examples(self):
        assert set_algebra('intersect', S((0, 2)), S((1, 3))) == S((1, 2))
        assert set_algebra('difference', S((0, 1)), S((0, 1))) == IntervalSet.empty()
        assert set_algebra('union', S((0, "1/2")), S(("1/2", 1))) == S((0, 1))

    def test_difference_with_holes(self):
        s = S((0, 10)).difference(S((1, 2), (4, 5), (9, 12)))
        assert s == S((0, 1), (2, 4), (5, 9))

    def test_contains_is_half_open(self):
        s = S((0, 1))
        assert s.contains(0)
        assert not s.contains(1)

    def test_inclusion_exclusion(self):
        s, t = S((0, 2), (5, 7)), S((1, 6))
        assert s.union(t).measure == s.measure + t.measure - s.intersection(t).measure

    def test_scale(self):
        assert S((1, 2)).scale("1/2") == S(("1/2", 1))


class TestCarve:
    def test_leftmost_prefix(self):
        assert carve(S((0, 1)), "1/2") == S((0, "1/2"))
        assert carve(S((0, "1/4"), ("1/2", 1)), "1/2") == S((0, "1/4"), ("1/2", "3/4"))

    def test_full_and_zero(self):
        s = S((0, 1), (2, 3))
        assert carve(s, s.measure) == s
        assert carve(s, 0) == IntervalSet.empty()

    @pytest.mark.parametrize("c", ["-1/2", "5/2"])
    def test_out_of_range(self, c):
        with pytest.raises(DemandExceedsMeasureError):
            carve(S((0, 1), (2, 3)), c)


class TestPartition:
    def test_examples(self):
        assert partition(S((0, 1)), ["1/3", "2/3"]) == [S((0, "1/3")), S(("1/3", 1))]
        assert partition(S((0, 1)), [1]) == [S((0, 1))]
        assert partition(S((0, "1/2"), (1, "3/2")), ["1/2", "1/2"]) == [S((0, "1/2")), S((1, "3/2"))]

    def test_pieces_match_repeated_carving(self):
        s = S((0, "1/3"), ("1/2", 2), (3, "13/4"))
        sizes = [Fraction(1, 4), Fraction(1, 2), Fraction(2, 3), s.measure - Fraction(17, 12)]
        rest = s
        expected = []
        for size in sizes:
            piece = carve(rest, size)
            expected.append(piece)
            rest = rest.difference(piece)
        assert partition(s, sizes) == expected

    def test_errors(self):
        with pytest.raises(PartitionSumMismatchError):
            partition(S((0, 1)), ["1/2"])
        with pytest.raises(NonpositivePartError):
            partition(S((0, 1)), [0, 1])


class TestRandomSets:
    def test_normal_form(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            s = random_set(rng)
            for prev, part in zip(s.parts, s.parts[1:]):
                assert prev.lo < prev.hi < part.lo < part.hi
            assert IntervalSet(s.parts) == s
            pairs = s.to_pairs()
            shuffled = [pairs[i] for i in rng.permutation(len(pairs))]
            assert IntervalSet.of(*shuffled) == s
            lo, hi = pairs[0]
            mid = (lo + hi) / 2
            assert IntervalSet.of((lo, mid), (mid, hi), *pairs[1:]) == s

    def test_additivity_on_disjoint_sets(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            s = random_set(rng)
            t = random_set(rng).difference(s)
            assert s.isdisjoint(t)
            assert measure(s.union(t)) == measure(s) + measure(t)

    def test_set_algebra_pointwise(self):
        rng = np.random.default_rng(29)
        rules = {
            'union': lambda a, b: a or b,
            'intersect': lambda a, b: a and b,
            'difference': lambda a, b: a and not b,
        }
        for _ in range(150):
            s, t = random_set(rng), random_set(rng)
            for op, rule in rules.items():
                result = set_algebra(op, s, t)
                for x in grid_points():
                    assert result.contains(x) == rule(s.contains(x), t.contains(x))
                assert set_algebra('union', s, t).measure == \
                    s.measure + t.measure - set_algebra('intersect', s, t).measure

    def test_carve_contract(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            s = random_set(rng)
            c = s.measure * Fraction(int(rng.integers(0, 17)), 16)
            piece = carve(s, c)
            assert piece.measure == c
            assert piece.issubset(s)
            if piece:
                sup = piece.parts[-1].hi
                assert s.intersection(IntervalSet.of((s.parts[0].lo, sup))) == piece

    def test_partition_contract(self):
        rng = np.random.default_rng(37)
        for _ in range(200):
            s = random_set(rng)
            weights = [int(w) for w in rng.integers(1, 6, size=int(rng.integers(1, 6)))]
            sizes = [s.measure * Fraction(w, sum(weights)) for w in weights]
            pieces = partition(s, sizes)
            assert [piece.measure for piece in pieces] == sizes
            assert IntervalSet(tuple(p for piece in pieces for p in piece.parts)) == s
            rest = s
            for piece in pieces:
                assert piece == carve(rest, piece.measure)
                rest = rest.difference(piece)
            assert not rest
