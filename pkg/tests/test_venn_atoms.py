from fractions import Fraction

import numpy as np
import pytest

from errors import EmptyInstanceError, EmptySubsetError, InstanceTooLargeError
from measure import IntervalSet, union_all
from venn_atoms import (
    all_masks,
    atom_formula,
    atomize,
    format_mask,
    indices_to_mask,
    mask_to_indices,
    union_measure,
)

from conftest import S


def random_sets(rng, n, denom=8, span=16):
    sets = []
    for _ in range(n):
        pairs = []
        for _ in range(int(rng.integers(1, 4))):
            lo = int(rng.integers(0, span))
            hi = lo + int(rng.integers(1, 5))
            pairs.append((Fraction(lo, denom), Fraction(hi, denom)))
        sets.append(IntervalSet.of(*pairs))
    return sets


def test_mask_helpers():
    assert indices_to_mask([1, 3]) == 0b101
    assert mask_to_indices(0b110) == [2, 3]
    assert format_mask(0b11) == "{1,2}"
    assert list(all_masks(2)) == [1, 2, 3]


def test_shifted_pair_atoms():
    table = atomize([S((0, 2)), S((1, 3))])
    assert table.get(0b01) == S((0, 1))
    assert table.get(0b10) == S((2, 3))
    assert table.get(0b11) == S((1, 2))


def test_identical_sets_have_only_the_shared_atom():
    table = atomize([S((0, 1)), S((0, 1))])
    assert table.masks() == [0b11]
    assert table.get(0b01) == IntervalSet.empty()


def test_union_measure():
    table = atomize([S((0, 2)), S((1, 3))])
    assert union_measure(table, 0b01) == 2
    assert union_measure(table, 0b11) == 3
    with pytest.raises(EmptySubsetError):
        union_measure(table, 0)


def test_set_count_limits():
    with pytest.raises(EmptyInstanceError):
        atomize([])
    with pytest.raises(InstanceTooLargeError):
        atomize([S((0, 1))] * 17)


def test_random_atoms_match_definition_and_recompose():
    rng = np.random.default_rng(7)
    for _ in range(50):
        sets = random_sets(rng, 3)
        table = atomize(sets)
        for mask in all_masks(3):
            assert table.get(mask) == atom_formula(sets, mask)
        atoms = [atom for _, atom in table.items()]
        assert union_all(atoms) == union_all(sets)
        assert sum(a.measure for a in atoms) == union_all(sets).measure


def test_membership_is_exact_on_sample_points():
    from oracle import sample_points

    rng = np.random.default_rng(11)
    for _ in range(20):
        sets = random_sets(rng, 3)
        table = atomize(sets)
        for x in sample_points(sets):
            inside = sum(1 << k for k, s in enumerate(sets) if s.contains(x))
            holders = [mask for mask, atom in table.items() if atom.contains(x)]
            assert holders == ([inside] if inside else [])
