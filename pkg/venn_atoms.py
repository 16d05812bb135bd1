"""
Venn Atoms Module
Decomposes A_1..A_n into the cells S_Q that lie in exactly the sets indexed by Q
"""
import bisect
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple

from config import DEFAULT_CONFIG
from errors import EmptyInstanceError, EmptySubsetError, InstanceTooLargeError
from measure import Interval, IntervalSet

logger = logging.getLogger(__name__)


# Masks are plain ints; bit k-1 stands for set k.

def indices_to_mask(indices: Sequence[int]) -> int:
    """1-based set indices -> mask"""
    mask = 0
    for k in indices:
        mask |= 1 << (k - 1)
    return mask


def mask_to_indices(mask: int) -> List[int]:
    """mask -> sorted 1-based set indices"""
    indices = []
    k = 1
    while mask:
        if mask & 1:
            indices.append(k)
        mask >>= 1
        k += 1
    return indices


def mask_members(mask: int) -> List[int]:
    """mask -> sorted 0-based positions"""
    return [k - 1 for k in mask_to_indices(mask)]


def popcount(mask: int) -> int:
    return bin(mask).count('1')


def all_masks(n: int) -> range:
    """Every nonempty subset of [n] in ascending numeric order"""
    return range(1, 1 << n)


def format_mask(mask: int) -> str:
    """Mask as a 1-based index set, e.g. {1,3}"""
    return "{" + ",".join(str(k) for k in mask_to_indices(mask)) + "}"


def check_set_count(n: int, cap: int = None) -> None:
    """Reject set counts outside [1, cap]"""
    cap = DEFAULT_CONFIG['max_sets'] if cap is None else cap
    if n < 1:
        raise EmptyInstanceError(f"at least one subset is required, got {n}")
    if n > cap:
        raise InstanceTooLargeError(f"{n} subsets exceeds the cap of {cap}")


@dataclass(frozen=True)
class AtomTable:
    """Nonempty Venn cells keyed by mask, in ascending mask order"""

    n: int
    atoms: Dict[int, IntervalSet] = field(default_factory=dict)

    def masks(self) -> List[int]:
        return list(self.atoms)

    def items(self) -> Iterator[Tuple[int, IntervalSet]]:
        return iter(self.atoms.items())

    def get(self, mask: int) -> IntervalSet:
        return self.atoms.get(mask, IntervalSet.empty())

    def atom_measure(self, mask: int) -> Fraction:
        return self.get(mask).measure

    def masks_containing(self, k: int) -> List[int]:
        """Atoms inside A_k (k is 0-based)"""
        return [mask for mask in self.atoms if mask >> k & 1]

    def __len__(self) -> int:
        return len(self.atoms)


def atomize(sets: Sequence[IntervalSet], n: int = None, cap: int = None) -> AtomTable:
    """
    S_Q = (∩_{i∈Q} A_i) \\ (∪_{i∉Q} A_i) for every nonempty Q.

    Computed by sweeping the elementary segments between consecutive
    endpoints: membership is constant on each half-open segment.
    """
    n = len(sets) if n is None else n
    check_set_count(n, cap)
    if len(sets) != n:
        raise EmptyInstanceError(f"expected {n} subsets, got {len(sets)}")

    endpoints = sorted({x for s in sets for x in s.endpoints()})
    masks = [0] * max(len(endpoints) - 1, 0)
    for k, s in enumerate(sets):
        for part in s.parts:
            start = bisect.bisect_left(endpoints, part.lo)
            stop = bisect.bisect_left(endpoints, part.hi)
            for seg in range(start, stop):
                masks[seg] |= 1 << k

    cells: Dict[int, List[Interval]] = {}
    for seg, mask in enumerate(masks):
        if mask:
            cells.setdefault(mask, []).append(Interval(endpoints[seg], endpoints[seg + 1]))

    atoms = {mask: IntervalSet(tuple(cells[mask])) for mask in sorted(cells)}
    logger.debug("atomized %d sets into %d nonempty atoms", n, len(atoms))
    return AtomTable(n=n, atoms=atoms)


def union_measure(table: AtomTable, i_set: int) -> Fraction:
    """ν(∪_{i∈I} A_i) as the total measure of atoms meeting I"""
    if i_set <= 0:
        raise EmptySubsetError("index set must be nonempty")
    return sum((s.measure for mask, s in table.items() if mask & i_set), Fraction(0))


def atom_formula(sets: Sequence[IntervalSet], mask: int) -> IntervalSet:
    """The cell S_Q straight from its set-algebra definition"""
    members = mask_members(mask)
    inside = sets[members[0]]
    for k in members[1:]:
        inside = inside.intersection(sets[k])
    for k in range(len(sets)):
        if not mask >> k & 1:
            inside = inside.difference(sets[k])
    return inside
