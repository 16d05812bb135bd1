"""
Oracle Module
Independent reference computations: exhaustive Hall check by plain set algebra,
allocation validation, and brute-force search for the discrete problem
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, List, Optional, Sequence, Tuple

from config import DEFAULT_CONFIG
from discrete_matcher import DiscreteInstance
from errors import OracleScaleError
from hall_certificates import Certificate, Feasible, Instance, ViolatingSet
from measure import IntervalSet

logger = logging.getLogger(__name__)


def _union(sets: Sequence[IntervalSet]) -> IntervalSet:
    result = IntervalSet.empty()
    for s in sets:
        result = result.union(s)
    return result


def oracle(inst: Instance, cap: Optional[int] = None) -> Certificate:
    """
    Check ν(∪_{i∈I} A_i) ≥ Σ_{i∈I} m_i for all 2^n − 1 index sets using only
    pairwise unions of the input sets. Same tie-break as the exhaustive
    checker: largest deficit, then smallest mask.
    """
    cap = DEFAULT_CONFIG['max_exhaustive_sets'] if cap is None else cap
    if inst.n > cap:
        raise OracleScaleError(f"oracle handles at most {cap} sets, got {inst.n}")

    worst = None
    for mask in range(1, 1 << inst.n):
        chosen = [k for k in range(inst.n) if mask >> k & 1]
        lhs = _union([inst.subsets[k] for k in chosen]).measure
        rhs = sum((inst.demands[k] for k in chosen), Fraction(0))
        if lhs < rhs and (worst is None or rhs - lhs > worst[0]):
            worst = (rhs - lhs, mask, lhs, rhs)

    if worst is None:
        return Feasible()
    _, mask, lhs, rhs = worst
    return ViolatingSet(mask, lhs, rhs)


@dataclass
class ValidationReport:
    passed: bool = True
    failures: List[str] = field(default_factory=list)

    def fail(self, message: str) -> None:
        self.passed = False
        self.failures.append(message)

    @property
    def verdict(self) -> str:
        return 'pass' if self.passed else 'fail'


def validate(inst: Instance, parts: Sequence[IntervalSet]) -> ValidationReport:
    """B_k ⊆ A_k, pairwise disjoint, ν(B_k) = m_k exactly"""
    report = ValidationReport()
    if len(parts) != inst.n:
        report.fail(f"expected {inst.n} parts, got {len(parts)}")
        return report

    for k, (part, subset, demand) in enumerate(zip(parts, inst.subsets, inst.demands)):
        if not part.issubset(subset):
            report.fail(f"B_{k + 1} is not a subset of A_{k + 1}: {part.difference(subset)} lies outside")
        if part.measure != demand:
            report.fail(f"B_{k + 1} has measure {part.measure}, expected {demand}")
    for j, k in itertools.combinations(range(inst.n), 2):
        overlap = parts[j].intersection(parts[k])
        if overlap:
            report.fail(f"B_{j + 1} and B_{k + 1} overlap on {overlap}")

    if not report.passed:
        logger.warning("allocation failed validation: %s", "; ".join(report.failures))
    return report


def brute_force_discrete(inst: DiscreteInstance) -> Optional[Tuple[Tuple[Hashable, ...], ...]]:
    """First disjoint selection (D_1..D_n) found by exhaustive search, or None"""

    def search(k: int, used: frozenset) -> Optional[List[Tuple[Hashable, ...]]]:
        if k == inst.n:
            return []
        free = [e for e in inst.ground if e in inst.subsets[k] and e not in used]
        for combo in itertools.combinations(free, inst.demands[k]):
            rest = search(k + 1, used | frozenset(combo))
            if rest is not None:
                return [combo] + rest
        return None

    found = search(0, frozenset())
    return tuple(found) if found is not None else None


def discrete_condition_holds(inst: DiscreteInstance) -> bool:
    """|∪_{i∈I} A_i| ≥ Σ_{i∈I} d_i for every nonempty I, by direct counting"""
    return all(inst.union_size(mask) >= inst.demand_of(mask) for mask in range(1, 1 << inst.n))


def sample_points(sets: Sequence[IntervalSet]) -> List[Fraction]:
    """Every endpoint, a midpoint of every elementary segment, and one point outside on each side"""
    points = sorted({x for s in sets for x in s.endpoints()})
    samples = list(points)
    samples.extend((a + b) / 2 for a, b in zip(points, points[1:]))
    if points:
        samples.extend([points[0] - 1, points[-1] + 1])
    return samples
