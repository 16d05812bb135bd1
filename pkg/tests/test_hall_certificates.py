from fractions import Fraction

import numpy as np
import pytest

from errors import InstanceFormatError, InstanceTooLargeError, NonpositiveDemandError, NotASubsetError
from hall_certificates import (
    Feasible,
    Instance,
    ViolatingSet,
    check_exhaustive,
    check_flow,
    drop_zero_demands,
    get_available_checkers,
    is_feasible,
    necessity_check,
)
from measure import IntervalSet

from conftest import S


class TestInstance:
    def test_validation(self):
        with pytest.raises(NotASubsetError):
            Instance.build(S((0, 1)), [S((0, 2))], [1])
        with pytest.raises(NonpositiveDemandError):
            Instance.build(S((0, 1)), [S((0, 1))], [0])
        with pytest.raises(InstanceFormatError):
            Instance.build(S((0, 1)), [S((0, 1))], [1, 1])
        with pytest.raises(InstanceTooLargeError):
            Instance.build(S((0, 1)), [S((0, 1))] * 17, [1] * 17)

    def test_default_names(self, shifted_pair):
        assert shifted_pair.names == ("A1", "A2")
        assert shifted_pair.total_demand == 3

    def test_scaled(self, shifted_pair):
        doubled = shifted_pair.scaled(2)
        assert doubled.subsets[0] == S((0, 4))
        assert doubled.demands == (3, 3)


class TestCheckers:
    def test_feasible_pair(self, shifted_pair):
        assert check_exhaustive(shifted_pair) == Feasible()
        certificate = check_flow(shifted_pair)
        assert is_feasible(certificate)
        assert certificate.flow_value == 3

    def test_crowded_pair(self, crowded_pair):
        certificate = check_exhaustive(crowded_pair)
        assert certificate == ViolatingSet(0b11, Fraction(1), Fraction(6, 5))
        assert check_flow(crowded_pair).i_set == 0b11

    def test_boundary_equality_is_feasible(self):
        inst = Instance.build(S((0, 1)), [S((0, 1))], [1])
        assert is_feasible(check_exhaustive(inst))
        assert is_feasible(check_flow(inst))

    def test_violating_set_must_violate(self):
        with pytest.raises(RuntimeError):
            ViolatingSet(1, Fraction(1), Fraction(1))

    def test_flow_agrees_with_exhaustive(self, generated):
        rng = np.random.default_rng(3)
        for seed in range(150):
            mode = ('feasible', 'infeasible', 'boundary')[seed % 3]
            inst = generated(seed, n=int(rng.integers(1, 6)), mode=mode).instance
            exhaustive = check_exhaustive(inst)
            flow = check_flow(inst)
            assert is_feasible(exhaustive) == is_feasible(flow)
            if not is_feasible(flow):
                assert inst.union_of(flow.i_set).measure < inst.demand_of(flow.i_set)

    def test_registry(self, crowded_pair):
        checkers = get_available_checkers()
        assert set(checkers) == {'exhaustive', 'flow', 'oracle'}
        assert all(not is_feasible(check(crowded_pair)) for check in checkers.values())


def test_necessity_check_accepts_valid_parts(shifted_pair):
    assert necessity_check(shifted_pair, [S((0, "3/2")), S(("3/2", 3))]) == []
    overfull = [S((0, 2)), S((0, 2))]
    assert necessity_check(shifted_pair, overfull) != []


def test_drop_zero_demands():
    inst, kept = drop_zero_demands(S((0, 2)), [S((0, 1)), S((0, 2)), S((1, 2))], ["0", "1", "1/2"],
                                   ["X", "Y", "Z"])
    assert kept == [1, 2]
    assert inst.names == ("Y", "Z")
    assert inst.demands == (1, Fraction(1, 2))
    with pytest.raises(NonpositiveDemandError):
        drop_zero_demands(S((0, 1)), [S((0, 1))], ["-1"])


@pytest.mark.slow
def test_flow_agrees_with_exhaustive_up_to_eight_sets(generated):
    for seed in range(240):
        mode = ('feasible', 'infeasible', 'boundary')[seed % 3]
        inst = generated(seed, n=1 + seed % 8, mode=mode, denom_cap=64).instance
        exhaustive = check_exhaustive(inst)
        flow = check_flow(inst)
        assert is_feasible(exhaustive) == is_feasible(flow)
        if not is_feasible(flow):
            assert inst.union_of(flow.i_set).measure < inst.demand_of(flow.i_set)


@pytest.mark.slow
def test_lowering_demands_keeps_feasibility(generated):
    rng = np.random.default_rng(11)
    for seed in range(200):
        inst = generated(seed, n=1 + seed % 5, mode=('feasible', 'boundary')[seed % 2]).instance
        assert is_feasible(check_flow(inst))
        factors = [Fraction(int(rng.integers(1, 9)), 8) for _ in range(inst.n)]
        lowered = Instance.build(inst.universe, inst.subsets,
                                 [m * f for m, f in zip(inst.demands, factors)], inst.names)
        assert is_feasible(check_exhaustive(lowered))
        assert is_feasible(check_flow(lowered))


@pytest.mark.slow
@pytest.mark.parametrize("factor", ["3/7", "5/2"])
def test_scaling_keeps_verdict_and_mask(generated, factor):
    for seed in range(150):
        mode = ('feasible', 'infeasible', 'boundary')[seed % 3]
        inst = generated(seed, n=1 + seed % 5, mode=mode).instance
        scaled = inst.scaled(factor)
        before, after = check_exhaustive(inst), check_exhaustive(scaled)
        assert is_feasible(before) == is_feasible(after)
        assert is_feasible(check_flow(inst)) == is_feasible(check_flow(scaled))
        if not is_feasible(before):
            assert after.i_set == before.i_set
            assert after.deficit == before.deficit * Fraction(factor)
            assert check_flow(scaled).i_set == check_flow(inst).i_set
