"""Shared fixtures"""
from fractions import Fraction

import pytest

from hall_certificates import Instance
from measure import IntervalSet


def S(*pairs):
    """IntervalSet from (lo, hi) pairs given as ints or "p/q" strings"""
    return IntervalSet.of(*pairs)


@pytest.fixture
def shifted_pair():
    """A_1=[0,2), A_2=[1,3), m=(3/2, 3/2): feasible"""
    return Instance.build(S((0, 3)), [S((0, 2)), S((1, 3))], [Fraction(3, 2), Fraction(3, 2)])


@pytest.fixture
def crowded_pair():
    """A_1=A_2=[0,1), m=(3/5, 3/5): violated on {1,2}"""
    return Instance.build(S((0, 1)), [S((0, 1)), S((0, 1))], ["3/5", "3/5"])


@pytest.fixture
def half_unit():
    """n=1, A_1=[0,1), m=1/2"""
    return Instance.build(S((0, 1)), [S((0, 1))], ["1/2"])


@pytest.fixture
def generated():
    """Factory over the seeded generator"""
    from instance_generator import generate

    def make(seed, n=2, mode='feasible', denom_cap=16):
        return generate(seed, n, mode, denom_cap)

    return make
