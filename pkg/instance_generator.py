"""
Instance Generator Module
Seeded random instances with a planted allocation: feasible, infeasible or tight
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

import numpy as np

from config import DEFAULT_CONFIG
from errors import ConfigError
from hall_certificates import Instance
from measure import Interval, IntervalSet, union_all
from venn_atoms import check_set_count, mask_members

logger = logging.getLogger(__name__)

GENERATOR_MODES = ('feasible', 'infeasible', 'boundary')


@dataclass(frozen=True)
class GeneratedInstance:
    """The instance plus what the construction knows about it"""

    instance: Instance
    mode: str
    seed: int
    planted: tuple          # the planted disjoint allocation B_1..B_n
    mask: Optional[int]     # violated mask (infeasible) or tight mask (boundary)


def _cells(rng: np.random.Generator, count: int, denom: int) -> List[IntervalSet]:
    """Consecutive cells of random integer width (in units of 1/denom) with random gaps"""
    cells = []
    cursor = 0
    for _ in range(count):
        cursor += int(rng.integers(0, 2))
        width = int(rng.integers(1, 4))
        cells.append(IntervalSet((Interval(Fraction(cursor, denom), Fraction(cursor + width, denom)),)))
        cursor += width
    return cells


def generate(seed: int, n: int, mode: str = 'feasible', denom_cap: Optional[int] = None) -> GeneratedInstance:
    """
    Plant disjoint B_k built from random cells, then grow each A_k with extra
    cells. infeasible: raise the demands of a random mask past its union.
    boundary: the sets of a random mask only grow inside their own planted
    cells, so that mask is met with equality.
    """
    if mode not in GENERATOR_MODES:
        raise ConfigError(f"mode must be one of {GENERATOR_MODES}, got {mode!r}")
    check_set_count(n, DEFAULT_CONFIG['max_sets'])
    denom_cap = DEFAULT_CONFIG['default_denom_cap'] if denom_cap is None else denom_cap
    if denom_cap < 2 or denom_cap > DEFAULT_CONFIG['generator_denom_cap']:
        raise ConfigError(f"denom_cap must lie in [2, {DEFAULT_CONFIG['generator_denom_cap']}]")

    rng = np.random.default_rng(seed)
    denom = int(rng.integers(1, denom_cap // 2 + 1))
    count = int(rng.integers(2 * n, 4 * n + 3))
    cells = _cells(rng, count, denom)
    order = [int(i) for i in rng.permutation(count)]

    owned: List[List[int]] = [[] for _ in range(n)]
    for k in range(n):
        owned[k].append(order[k])
    for index in order[n:]:
        k = int(rng.integers(0, n + 1))
        if k < n:
            owned[k].append(index)
    planted = [union_all(cells[i] for i in owned[k]) for k in range(n)]

    mask = int(rng.integers(1, 1 << n))
    tight = mask_members(mask) if mode == 'boundary' else []
    inside = sorted(i for k in tight for i in owned[k])

    subsets, demands = [], []
    for k in range(n):
        pool = inside if k in tight else list(range(count))
        extra = [pool[int(i)] for i in rng.choice(len(pool), size=int(rng.integers(0, 4)), replace=True)]
        subsets.append(planted[k].union(union_all(cells[i] for i in extra)))
        if k in tight:
            demands.append(planted[k].measure)
        else:
            demands.append(planted[k].measure * Fraction(int(rng.integers(1, 3)), 2))

    if mode == 'infeasible':
        members = mask_members(mask)
        covered = union_all(subsets[k] for k in members).measure
        pushed = members[int(rng.integers(0, len(members)))]
        shortfall = covered - sum(demands[k] for k in members)
        demands[pushed] += shortfall + Fraction(1, denom)

    universe = union_all(cells)
    inst = Instance.build(universe, subsets, demands)
    logger.debug("generated %s instance seed=%d n=%d denom=%d", mode, seed, n, denom)
    return GeneratedInstance(instance=inst, mode=mode, seed=seed, planted=tuple(planted),
                             mask=None if mode == 'feasible' else mask)
