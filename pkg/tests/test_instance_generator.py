import pytest

from errors import ConfigError
from hall_certificates import Feasible, check_exhaustive, is_feasible
from instance_generator import generate
from instance_loader import format_instance, parse_instance
from oracle import oracle


def test_feasible_seed_one():
    generated = generate(1, 2, 'feasible')
    assert check_exhaustive(generated.instance) == Feasible()
    assert generated.mask is None


def test_infeasible_seed_one_violates_planted_mask():
    generated = generate(1, 2, 'infeasible')
    inst = generated.instance
    assert inst.union_of(generated.mask).measure < inst.demand_of(generated.mask)
    assert not is_feasible(oracle(inst))


def test_same_seed_same_bytes():
    for mode in ('feasible', 'infeasible', 'boundary'):
        assert format_instance(generate(42, 4, mode).instance) == format_instance(generate(42, 4, mode).instance)


def test_planted_allocation_is_disjoint_and_inside():
    for seed in range(40):
        generated = generate(seed, 1 + seed % 5, 'feasible')
        inst = generated.instance
        for k, planted in enumerate(generated.planted):
            assert planted.issubset(inst.subsets[k])
            assert planted.measure >= inst.demands[k]
            for other in generated.planted[k + 1:]:
                assert planted.isdisjoint(other)


def test_boundary_mode_is_tight_and_feasible():
    for seed in range(40):
        generated = generate(seed, 1 + seed % 5, 'boundary')
        inst = generated.instance
        assert inst.union_of(generated.mask).measure == inst.demand_of(generated.mask)
        assert is_feasible(check_exhaustive(inst))


def test_round_trip_of_generated_instances():
    for seed in range(30):
        inst = generate(seed, 1 + seed % 6, ('feasible', 'infeasible', 'boundary')[seed % 3]).instance
        assert parse_instance(format_instance(inst)) == inst


def test_denominators_respect_cap():
    for seed in range(20):
        inst = generate(seed, 3, 'feasible', denom_cap=8).instance
        endpoints = [x for s in inst.subsets for x in s.endpoints()]
        assert all(x.denominator <= 8 for x in endpoints + list(inst.demands))


def test_bad_arguments():
    with pytest.raises(ConfigError):
        generate(0, 2, 'chaotic')
    with pytest.raises(ConfigError):
        generate(0, 2, 'feasible', denom_cap=1)
