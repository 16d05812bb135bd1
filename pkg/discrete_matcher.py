"""
Discrete Matcher Module
Disjoint D_k ⊆ A_k with |D_k| = d_k by integral max flow, plus the uniform-weight and block forms
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, maximum_flow

from errors import (
    BlockMeasureMismatchError,
    BlockOverlapError,
    EmptyInstanceError,
    InstanceFormatError,
    InvariantViolationError,
    NonpositiveDemandError,
    NonpositiveScaleError,
)
from measure import IntervalSet, RationalLike, parse_rational, union_all
from venn_atoms import format_mask, mask_members

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiscreteInstance:
    """Finite ground set, subsets A_1..A_n and integer demands d_1..d_n"""

    ground: Tuple[Hashable, ...]
    subsets: Tuple[frozenset, ...]
    demands: Tuple[int, ...]
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'ground', tuple(self.ground))
        object.__setattr__(self, 'subsets', tuple(frozenset(s) for s in self.subsets))
        object.__setattr__(self, 'demands', tuple(self.demands))
        if not self.names:
            object.__setattr__(self, 'names', tuple(f"A{k}" for k in range(1, len(self.subsets) + 1)))
        else:
            object.__setattr__(self, 'names', tuple(self.names))
        self._validate()

    def _validate(self):
        if not self.subsets:
            raise EmptyInstanceError("at least one subset is required")
        if len(set(self.ground)) != len(self.ground):
            raise InstanceFormatError("ground elements must be distinct", context="ground")
        if len(self.demands) != len(self.subsets) or len(self.names) != len(self.subsets):
            raise InstanceFormatError(f"{len(self.subsets)} subsets but {len(self.demands)} demands")
        members = set(self.ground)
        for k, (subset, demand) in enumerate(zip(self.subsets, self.demands)):
            stray = subset - members
            if stray:
                raise InstanceFormatError(f"elements {sorted(map(repr, stray))} not in ground",
                                          context=f"sets[{k}]")
            if isinstance(demand, bool) or not isinstance(demand, (int, np.integer)) or demand < 1:
                raise NonpositiveDemandError(f"demand must be a positive integer, got {demand!r}",
                                             context=f"demands[{k}]")

    @property
    def n(self) -> int:
        return len(self.subsets)

    def union_size(self, mask: int) -> int:
        covered = set()
        for k in mask_members(mask):
            covered |= self.subsets[k]
        return len(covered)

    def demand_of(self, mask: int) -> int:
        return sum(self.demands[k] for k in mask_members(mask))


@dataclass(frozen=True)
class DiscreteSolution:
    """Either the parts D_1..D_n (in ground order) or a violating mask"""

    parts: Optional[Tuple[Tuple[Hashable, ...], ...]] = None
    violating: Optional[int] = None

    @property
    def feasible(self) -> bool:
        return self.parts is not None

    @property
    def verdict(self) -> str:
        return 'feasible' if self.feasible else 'infeasible'


@dataclass(frozen=True)
class ScaledSolution:
    solution: DiscreteSolution
    xi: Fraction
    eta_measures: Tuple[Fraction, ...]


@dataclass(frozen=True)
class BlockSolution:
    solution: DiscreteSolution
    xi: Fraction
    measures: Tuple[Fraction, ...]
    regions: Tuple[IntervalSet, ...]

    @property
    def feasible(self) -> bool:
        return self.solution.feasible


def _integral_flow(demands: Sequence[int], collections: Sequence[Sequence[int]],
                   n_items: int) -> Tuple[Optional[List[List[int]]], Optional[int]]:
    """
    Node layout: 0 source, 1..n demands, n+1..n+m items, n+m+1 sink.
    Returns (per-demand item lists, None) or (None, violating mask).
    """
    n = len(demands)
    sink = n + n_items + 1
    rows, cols, caps = [], [], []
    for k, demand in enumerate(demands):
        rows.append(0)
        cols.append(k + 1)
        caps.append(int(demand))
    for k, items in enumerate(collections):
        for item in items:
            rows.append(k + 1)
            cols.append(n + 1 + item)
            caps.append(1)
    for item in range(n_items):
        rows.append(n + 1 + item)
        cols.append(sink)
        caps.append(1)

    size = sink + 1
    graph = csr_matrix((np.asarray(caps, dtype=np.int32),
                        (np.asarray(rows, dtype=np.int32), np.asarray(cols, dtype=np.int32))),
                       shape=(size, size))
    result = maximum_flow(graph, 0, sink)
    total = sum(int(d) for d in demands)
    logger.debug("integral flow %d of %d over %d items", result.flow_value, total, n_items)

    if result.flow_value == total:
        chosen: List[List[int]] = [[] for _ in range(n)]
        flow = result.flow.tocoo()
        for u, v, amount in zip(flow.row, flow.col, flow.data):
            if amount > 0 and 1 <= u <= n and n + 1 <= v < sink:
                chosen[u - 1].append(int(v) - n - 1)
        for items in chosen:
            items.sort()
        return chosen, None

    residual = (graph - result.flow).tocsr()
    residual.data[residual.data < 0] = 0
    residual.eliminate_zeros()
    reached = breadth_first_order(residual, 0, directed=True, return_predecessors=False)
    mask = 0
    for node in reached:
        if 1 <= node <= n:
            mask |= 1 << (int(node) - 1)
    return None, mask


def solve_discrete(inst: DiscreteInstance) -> DiscreteSolution:
    """Integral max flow; the min cut names a violating mask when short"""
    position = {element: index for index, element in enumerate(inst.ground)}
    collections = [sorted(position[e] for e in subset) for subset in inst.subsets]
    chosen, mask = _integral_flow(inst.demands, collections, len(inst.ground))

    if chosen is None:
        if inst.union_size(mask) >= inst.demand_of(mask):
            raise InvariantViolationError(f"min-cut mask {format_mask(mask)} does not violate the condition")
        return DiscreteSolution(violating=mask)

    parts = tuple(tuple(inst.ground[i] for i in items) for items in chosen)
    for k, part in enumerate(parts):
        if len(part) != inst.demands[k] or not set(part) <= inst.subsets[k]:
            raise InvariantViolationError(f"D_{k + 1} = {part} breaks the matching contract")
    return DiscreteSolution(parts=parts)


def solve_transversal(inst: DiscreteInstance) -> DiscreteSolution:
    """Classical Hall: one distinct representative per set"""
    return solve_discrete(DiscreteInstance(inst.ground, inst.subsets, (1,) * inst.n, inst.names))


def solve_scaled(inst: DiscreteInstance, xi: RationalLike) -> ScaledSolution:
    """The same matching under η(X) = ξ|X|; every comparison is just scaled by ξ"""
    scale = parse_rational(xi)
    if scale <= 0:
        raise NonpositiveScaleError(f"xi must be positive, got {scale}")

    solution = solve_discrete(inst)
    if solution.feasible:
        eta = tuple(scale * len(part) for part in solution.parts)
        if eta != tuple(scale * d for d in inst.demands):
            raise InvariantViolationError("η-measures differ from ξ d_k")
    else:
        mask = solution.violating
        eta = ()
        if not scale * inst.union_size(mask) < scale * inst.demand_of(mask):
            raise InvariantViolationError(f"mask {format_mask(mask)} is not violated under η")
    return ScaledSolution(solution=solution, xi=scale, eta_measures=eta)


def check_blocks(blocks: Sequence[IntervalSet]) -> Fraction:
    """Common measure ξ of pairwise disjoint, equal-measure blocks"""
    if not blocks:
        return Fraction(0)
    xi = blocks[0].measure
    for index, block in enumerate(blocks):
        if block.measure != xi:
            raise BlockMeasureMismatchError(f"block {index} has measure {block.measure}, expected {xi}")
    if union_all(blocks).measure != xi * len(blocks):
        raise BlockOverlapError("blocks are not pairwise disjoint")
    return xi


def solve_blocks(blocks: Sequence[IntervalSet], collections: Sequence[Sequence[int]],
                 demands: Sequence[int], verify: bool = True) -> BlockSolution:
    """Match demands to whole blocks of measure ξ; ν of each region is ξ d_k"""
    xi = check_blocks(blocks) if verify else (blocks[0].measure if blocks else Fraction(0))
    for k, alpha in enumerate(collections):
        if any(not 0 <= index < len(blocks) for index in alpha):
            raise InstanceFormatError("block index out of range", context=f"collections[{k}]")

    inst = DiscreteInstance(ground=tuple(range(len(blocks))),
                            subsets=tuple(frozenset(alpha) for alpha in collections),
                            demands=tuple(demands))
    solution = solve_discrete(inst)
    if not solution.feasible:
        return BlockSolution(solution=solution, xi=xi, measures=(), regions=())

    regions = tuple(union_all(blocks[i] for i in part) for part in solution.parts)
    measures = tuple(region.measure for region in regions)
    if verify and measures != tuple(xi * d for d in demands):
        raise InvariantViolationError("block regions do not have measure ξ d_k")
    return BlockSolution(solution=solution, xi=xi, measures=measures, regions=regions)
