from fractions import Fraction

import numpy as np
import pytest

from discrete_matcher import (
    DiscreteInstance,
    check_blocks,
    solve_blocks,
    solve_discrete,
    solve_scaled,
    solve_transversal,
)
from errors import (
    BlockMeasureMismatchError,
    BlockOverlapError,
    InstanceFormatError,
    NonpositiveDemandError,
    NonpositiveScaleError,
)
from oracle import brute_force_discrete, discrete_condition_holds

from conftest import S


def random_discrete(rng, max_ground=10, max_sets=4):
    size = int(rng.integers(1, max_ground + 1))
    ground = tuple(range(size))
    n = int(rng.integers(1, max_sets + 1))
    subsets = []
    for _ in range(n):
        picked = rng.random(size) < 0.45
        subset = frozenset(int(e) for e in np.flatnonzero(picked))
        subsets.append(subset or frozenset({int(rng.integers(0, size))}))
    demands = tuple(int(rng.integers(1, max(2, len(s)) + 1)) for s in subsets)
    return DiscreteInstance(ground=ground, subsets=tuple(subsets), demands=demands)


def assert_valid(inst, solution):
    used = set()
    for part, subset, demand in zip(solution.parts, inst.subsets, inst.demands):
        assert len(part) == demand
        assert set(part) <= subset
        assert used.isdisjoint(part)
        used.update(part)


class TestSolveDiscrete:
    def test_forced_example(self):
        inst = DiscreteInstance((1, 2, 3), ({1, 2}, {2, 3}), (1, 2))
        assert solve_discrete(inst).parts == ((1,), (2, 3))

    def test_two_demands_one_element(self):
        inst = DiscreteInstance((1,), ({1}, {1}), (1, 1))
        assert solve_discrete(inst).violating == 0b11

    def test_singleton(self):
        assert solve_discrete(DiscreteInstance((1,), ({1},), (1,))).parts == ((1,),)

    def test_validation(self):
        with pytest.raises(NonpositiveDemandError):
            DiscreteInstance((1,), ({1},), (0,))
        with pytest.raises(InstanceFormatError):
            DiscreteInstance((1,), ({2},), (1,))

    def test_agrees_with_brute_force(self):
        rng = np.random.default_rng(2024)
        for _ in range(150):
            inst = random_discrete(rng)
            solution = solve_discrete(inst)
            assert solution.feasible == (brute_force_discrete(inst) is not None)
            assert solution.feasible == discrete_condition_holds(inst)
            if solution.feasible:
                assert_valid(inst, solution)
            else:
                mask = solution.violating
                assert inst.union_size(mask) < inst.demand_of(mask)

    def test_transversal(self):
        inst = DiscreteInstance(("a", "b", "c"), ({"a", "b"}, {"a"}, {"b", "c"}), (2, 1, 2))
        solution = solve_transversal(inst)
        assert solution.parts == (("b",), ("a",), ("c",))
        crowded = DiscreteInstance(("a", "b"), ({"a", "b"}, {"a"}, {"b"}), (1, 1, 1))
        assert solve_transversal(crowded).violating == 0b111


class TestSolveScaled:
    def test_unit_scale_matches_plain(self):
        inst = DiscreteInstance((1, 2, 3), ({1, 2}, {2, 3}), (1, 2))
        assert solve_scaled(inst, 1).solution == solve_discrete(inst)

    def test_eta_measures(self):
        inst = DiscreteInstance((1, 2, 3), ({1, 2}, {2, 3}), (1, 2))
        assert solve_scaled(inst, "1/4").eta_measures == (Fraction(1, 4), Fraction(1, 2))

    def test_scaling_keeps_infeasibility(self):
        inst = DiscreteInstance((1,), ({1}, {1}), (1, 1))
        assert solve_scaled(inst, "1/4").solution.violating == 0b11

    def test_nonpositive_scale(self):
        with pytest.raises(NonpositiveScaleError):
            solve_scaled(DiscreteInstance((1,), ({1},), (1,)), 0)

    def test_verdict_invariant_under_scale(self):
        rng = np.random.default_rng(5)
        for _ in range(60):
            inst = random_discrete(rng)
            verdicts = {solve_scaled(inst, xi).solution.feasible for xi in ("1/3", "2", "7/5")}
            assert verdicts == {solve_discrete(inst).feasible}


class TestSolveBlocks:
    blocks = [S((0, "1/4")), S(("1/4", "1/2")), S(("1/2", "3/4"))]

    def test_example(self):
        result = solve_blocks(self.blocks, [[0, 1], [1, 2]], [1, 2])
        assert result.solution.parts == ((0,), (1, 2))
        assert result.measures == (Fraction(1, 4), Fraction(1, 2))
        assert result.regions == (S((0, "1/4")), S(("1/4", "3/4")))

    def test_one_block_two_demands(self):
        result = solve_blocks(self.blocks[:1], [[0], [0]], [1, 1])
        assert not result.feasible
        assert result.solution.violating == 0b11

    def test_saturation(self):
        result = solve_blocks(self.blocks, [[0], [1, 2]], [1, 2])
        assert result.solution.parts == ((0,), (1, 2))

    def test_block_checks(self):
        assert check_blocks(self.blocks) == Fraction(1, 4)
        with pytest.raises(BlockMeasureMismatchError):
            check_blocks([S((0, "1/4")), S((1, "3/2"))])
        with pytest.raises(BlockOverlapError):
            check_blocks([S((0, "1/4")), S(("1/8", "3/8"))])

    def test_unverified_blocks_are_trusted(self):
        overlapping = [S((0, "1/4")), S(("1/8", "3/8"))]
        with pytest.raises(BlockOverlapError):
            solve_blocks(overlapping, [[0], [1]], [1, 1])
        result = solve_blocks(overlapping, [[0], [1]], [1, 1], verify=False)
        assert result.feasible
        assert result.xi == Fraction(1, 4)


@pytest.mark.slow
def test_five_hundred_instances_against_brute_force():
    rng = np.random.default_rng(500)
    for _ in range(500):
        inst = random_discrete(rng)
        solution = solve_discrete(inst)
        assert solution.feasible == (brute_force_discrete(inst) is not None)
        if solution.feasible:
            assert_valid(inst, solution)
        verdicts = {solve_scaled(inst, xi).solution.feasible for xi in ("1/3", "1", "7/5")}
        assert verdicts == {solution.feasible}
