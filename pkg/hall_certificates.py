"""
Hall Certificates Module
Instances of the measure-theoretic Hall problem and executable feasibility certificates
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from config import DEFAULT_CONFIG
from errors import InstanceFormatError, InvariantViolationError, NonpositiveDemandError
from measure import IntervalSet, MeasureSpace, RationalLike, parse_rational, union_all
from venn_atoms import (
    AtomTable,
    all_masks,
    atomize,
    check_set_count,
    format_mask,
    mask_members,
    mask_to_indices,
    union_measure,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Instance:
    """Universe, subsets A_1..A_n and demands m_1..m_n"""

    space: MeasureSpace
    subsets: Tuple[IntervalSet, ...]
    demands: Tuple[Fraction, ...]
    names: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'subsets', tuple(self.subsets))
        object.__setattr__(self, 'demands', tuple(parse_rational(m) for m in self.demands))
        if not self.names:
            object.__setattr__(self, 'names', tuple(f"A{k}" for k in range(1, len(self.subsets) + 1)))
        else:
            object.__setattr__(self, 'names', tuple(self.names))
        self._validate()

    def _validate(self):
        n = len(self.subsets)
        check_set_count(n, DEFAULT_CONFIG['max_sets'])
        if len(self.demands) != n or len(self.names) != n:
            raise InstanceFormatError(
                f"{n} subsets but {len(self.demands)} demands and {len(self.names)} names")
        for k, (subset, demand) in enumerate(zip(self.subsets, self.demands)):
            self.space.require_subset(subset, context=f"sets[{k}]")
            if demand <= 0:
                raise NonpositiveDemandError(f"demand must be positive, got {demand}",
                                             context=f"demands[{k}]")

    @classmethod
    def build(cls, universe: IntervalSet, subsets: Sequence[IntervalSet],
              demands: Sequence[RationalLike], names: Optional[Sequence[str]] = None) -> 'Instance':
        return cls(MeasureSpace(universe), tuple(subsets), tuple(demands), tuple(names or ()))

    @property
    def n(self) -> int:
        return len(self.subsets)

    @property
    def universe(self) -> IntervalSet:
        return self.space.universe

    @property
    def total_demand(self) -> Fraction:
        return sum(self.demands, Fraction(0))

    def union_of(self, mask: int) -> IntervalSet:
        """∪_{i∈I} A_i by direct set algebra"""
        return union_all(self.subsets[k] for k in mask_members(mask))

    def demand_of(self, mask: int) -> Fraction:
        return sum((self.demands[k] for k in mask_members(mask)), Fraction(0))

    def scaled(self, factor: RationalLike) -> 'Instance':
        """Every endpoint and every demand multiplied by factor > 0"""
        c = parse_rational(factor)
        return Instance(MeasureSpace(self.universe.scale(c)),
                        tuple(s.scale(c) for s in self.subsets),
                        tuple(m * c for m in self.demands),
                        self.names)


@dataclass(frozen=True)
class Feasible:
    flow_value: Optional[Fraction] = None

    @property
    def verdict(self) -> str:
        return 'feasible'


@dataclass(frozen=True)
class ViolatingSet:
    """I with ν(∪_{i∈I} A_i) = lhs < rhs = Σ_{i∈I} m_i"""

    i_set: int
    lhs: Fraction
    rhs: Fraction

    def __post_init__(self):
        if not self.lhs < self.rhs:
            raise InvariantViolationError(
                f"mask {format_mask(self.i_set)} does not violate: {self.lhs} >= {self.rhs}")

    @property
    def verdict(self) -> str:
        return 'infeasible'

    @property
    def deficit(self) -> Fraction:
        return self.rhs - self.lhs

    @property
    def indices(self) -> List[int]:
        return mask_to_indices(self.i_set)


Certificate = Union[Feasible, ViolatingSet]


def is_feasible(certificate: Certificate) -> bool:
    return isinstance(certificate, Feasible)


def check_exhaustive(inst: Instance, table: Optional[AtomTable] = None) -> Certificate:
    """Test the inequality for every nonempty I; report the worst violation"""
    table = atomize(inst.subsets) if table is None else table
    worst: Optional[ViolatingSet] = None
    for mask in all_masks(inst.n):
        lhs = union_measure(table, mask)
        rhs = inst.demand_of(mask)
        if lhs < rhs and (worst is None or rhs - lhs > worst.deficit):
            worst = ViolatingSet(mask, lhs, rhs)

    if worst is None:
        return Feasible()
    logger.debug("exhaustive check: worst violation %s, deficit %s", format_mask(worst.i_set), worst.deficit)
    return worst


def check_flow(inst: Instance, table: Optional[AtomTable] = None) -> Certificate:
    """Decide feasibility by max flow; read I off the min cut when it falls short"""
    from continuous_allocator import build_network, max_flow

    table = atomize(inst.subsets) if table is None else table
    result = max_flow(build_network(inst, table))
    if result.value == inst.total_demand:
        return Feasible(flow_value=result.value)
    return cut_certificate(inst, table, result.value, result.source_demands)


def cut_certificate(inst: Instance, table: AtomTable, flow_value: Fraction,
                     source_demands: Sequence[int]) -> ViolatingSet:
    """Violating set read off the source side of a minimum cut"""
    mask = 0
    for k in source_demands:
        mask |= 1 << k
    lhs = union_measure(table, mask) if mask else Fraction(0)
    outside = inst.total_demand - inst.demand_of(mask) if mask else inst.total_demand
    if not mask or flow_value != outside + lhs:
        raise InvariantViolationError(
            f"min cut {format_mask(mask) if mask else '{}'} has value {outside + lhs}, flow is {flow_value}")
    return ViolatingSet(mask, lhs, inst.demand_of(mask))


def necessity_check(inst: Instance, parts: Sequence[IntervalSet]) -> List[int]:
    """
    Masks where ν(∪_{i∈I} A_i) < Σ_{i∈I} ν(B_i) for the given parts.

    Empty for any valid allocation: disjoint B_i ⊆ A_i force the inequality.
    """
    failing = []
    for mask in all_masks(inst.n):
        covered = inst.union_of(mask).measure
        used = sum((parts[k].measure for k in mask_members(mask)), Fraction(0))
        if covered < used:
            failing.append(mask)
    return failing


def drop_zero_demands(universe: IntervalSet, subsets: Sequence[IntervalSet],
                      demands: Sequence[RationalLike],
                      names: Optional[Sequence[str]] = None) -> Tuple[Instance, List[int]]:
    """
    Remove sets whose demand is exactly 0 and build the Instance from the rest.

    Returns the instance and the kept 0-based positions. A zero demand is
    trivially met by B_k = ∅, so dropping it changes no verdict.
    """
    values = [parse_rational(m) for m in demands]
    kept = [k for k, m in enumerate(values) if m != 0]
    names = list(names) if names else [f"A{k}" for k in range(1, len(subsets) + 1)]
    logger.info("dropping %d zero demands", len(values) - len(kept))
    inst = Instance.build(universe,
                          [subsets[k] for k in kept],
                          [values[k] for k in kept],
                          [names[k] for k in kept])
    return inst, kept


def get_available_checkers() -> Dict[str, Callable[[Instance], Certificate]]:
    """Checker name -> callable, for `check --method`"""
    from oracle import oracle

    return {
        'exhaustive': check_exhaustive,
        'flow': check_flow,
        'oracle': oracle,
    }
