"""
Measure Module
Exact rationals and the half-open interval-set algebra with its Lebesgue measure
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from errors import (
    DemandExceedsMeasureError,
    EmptyInstanceError,
    InvalidIntervalError,
    MalformedRationalError,
    NonpositivePartError,
    NotASubsetError,
    PartitionSumMismatchError,
)

Rational = Fraction
RationalLike = Union[Fraction, int, str]

_RATIONAL_PATTERN = re.compile(r'^-?\d+(/\d+)?$')

SET_OPERATIONS = ('union', 'intersect', 'difference')


def parse_rational(value: RationalLike) -> Fraction:
    """Parse "p/q" or "p" (or an int / Fraction) into an exact Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise MalformedRationalError(f"expected a rational string, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)

    text = value.strip()
    if not _RATIONAL_PATTERN.match(text):
        raise MalformedRationalError(f"malformed rational {value!r}")
    if '/' in text and int(text.split('/')[1]) == 0:
        raise MalformedRationalError(f"zero denominator in {value!r}")
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    """Canonical p/q text, integers without a denominator"""
    return str(Fraction(value))


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open real interval [lo, hi)"""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'lo', parse_rational(self.lo))
        object.__setattr__(self, 'hi', parse_rational(self.hi))
        if not self.lo < self.hi:
            raise InvalidIntervalError(f"interval needs lo < hi, got [{self.lo}, {self.hi})")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi})"


IntervalLike = Union[Interval, Tuple[RationalLike, RationalLike]]


def _as_interval(item: IntervalLike) -> Interval:
    if isinstance(item, Interval):
        return item
    lo, hi = item
    return Interval(lo, hi)


def _normalize(items: Iterable[IntervalLike]) -> Tuple[Interval, ...]:
    """Sort and merge overlapping or touching parts"""
    ordered = sorted(_as_interval(item) for item in items)
    merged: List[Interval] = []
    for part in ordered:
        if merged and part.lo <= merged[-1].hi:
            if part.hi > merged[-1].hi:
                merged[-1] = Interval(merged[-1].lo, part.hi)
        else:
            merged.append(part)
    return tuple(merged)


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of disjoint, non-adjacent half-open intervals in normal form"""

    parts: Tuple[Interval, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'parts', _normalize(self.parts))

    @classmethod
    def of(cls, *pairs: IntervalLike) -> 'IntervalSet':
        return cls(tuple(pairs))

    @classmethod
    def empty(cls) -> 'IntervalSet':
        return cls(())

    @property
    def measure(self) -> Fraction:
        """Lebesgue measure of a normalized set"""
        return sum((part.length for part in self.parts), Fraction(0))

    def endpoints(self) -> List[Fraction]:
        points = []
        for part in self.parts:
            points.extend((part.lo, part.hi))
        return points

    def to_pairs(self) -> List[Tuple[Fraction, Fraction]]:
        return [(part.lo, part.hi) for part in self.parts]

    def contains(self, point: RationalLike) -> bool:
        x = parse_rational(point)
        return any(part.lo <= x < part.hi for part in self.parts)

    def union(self, other: 'IntervalSet') -> 'IntervalSet':
        return IntervalSet(self.parts + other.parts)

    def intersection(self, other: 'IntervalSet') -> 'IntervalSet':
        """Two-pointer sweep over both part lists"""
        a, b = self.parts, other.parts
        i = j = 0
        out = []
        while i < len(a) and j < len(b):
            lo = max(a[i].lo, b[j].lo)
            hi = min(a[i].hi, b[j].hi)
            if lo < hi:
                out.append(Interval(lo, hi))
            if a[i].hi < b[j].hi:
                i += 1
            else:
                j += 1
        return IntervalSet(tuple(out))

    def difference(self, other: 'IntervalSet') -> 'IntervalSet':
        """Points of self not in other"""
        cuts = other.parts
        out = []
        j = 0
        for part in self.parts:
            lo = part.lo
            while j < len(cuts) and cuts[j].hi <= lo:
                j += 1
            k = j
            while k < len(cuts) and cuts[k].lo < part.hi and lo < part.hi:
                if cuts[k].lo > lo:
                    out.append(Interval(lo, cuts[k].lo))
                lo = max(lo, cuts[k].hi)
                k += 1
            if lo < part.hi:
                out.append(Interval(lo, part.hi))
        return IntervalSet(tuple(out))

    def issubset(self, other: 'IntervalSet') -> bool:
        return not self.difference(other)

    def isdisjoint(self, other: 'IntervalSet') -> bool:
        return not self.intersection(other)

    def scale(self, factor: RationalLike) -> 'IntervalSet':
        """Image under x -> factor * x, factor > 0"""
        c = parse_rational(factor)
        if c <= 0:
            raise InvalidIntervalError(f"scale factor must be positive, got {c}")
        return IntervalSet(tuple(Interval(p.lo * c, p.hi * c) for p in self.parts))

    def __bool__(self) -> bool:
        return bool(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self) -> str:
        if not self.parts:
            return "∅"
        return " ∪ ".join(str(part) for part in self.parts)


@dataclass(frozen=True)
class MeasureSpace:
    """The universe every handled set lives in"""

    universe: IntervalSet

    def __post_init__(self):
        if self.universe.measure <= 0:
            raise EmptyInstanceError("universe must have positive measure")

    def require_subset(self, s: IntervalSet, context: str = "") -> None:
        if not s.issubset(self.universe):
            raise NotASubsetError(f"{s} is not contained in the universe {self.universe}",
                                  context=context or None)


def measure(s: IntervalSet) -> Fraction:
    return s.measure


def union_all(sets: Iterable[IntervalSet]) -> IntervalSet:
    """Union of many sets with a single sort"""
    parts: List[Interval] = []
    for s in sets:
        parts.extend(s.parts)
    return IntervalSet(tuple(parts))


def set_algebra(op: str, s: IntervalSet, t: IntervalSet) -> IntervalSet:
    """union, intersect or difference by name"""
    if op == 'union':
        return s.union(t)
    if op == 'intersect':
        return s.intersection(t)
    if op == 'difference':
        return s.difference(t)
    raise ValueError(f"unknown set operation {op!r}; expected one of {SET_OPERATIONS}")


def carve(s: IntervalSet, c: RationalLike) -> IntervalSet:
    """Leftmost subset of s with measure exactly c"""
    target = parse_rational(c)
    total = s.measure
    if target < 0 or target > total:
        raise DemandExceedsMeasureError(f"cannot carve measure {target} from a set of measure {total}")

    taken = []
    remaining = target
    for part in s.parts:
        if remaining == 0:
            break
        if part.length <= remaining:
            taken.append(part)
            remaining -= part.length
        else:
            taken.append(Interval(part.lo, part.lo + remaining))
            remaining = Fraction(0)
    return IntervalSet(tuple(taken))


def partition(s: IntervalSet, rs: Sequence[RationalLike]) -> List[IntervalSet]:
    """Split s into consecutive leftmost pieces of the given measures"""
    sizes = [parse_rational(r) for r in rs]
    for index, size in enumerate(sizes):
        if size <= 0:
            raise NonpositivePartError(f"part {index} has nonpositive measure {size}")
    if sum(sizes, Fraction(0)) != s.measure:
        raise PartitionSumMismatchError(
            f"parts sum to {sum(sizes, Fraction(0))} but the set has measure {s.measure}")

    # One left-to-right sweep yields the same pieces as carving each size
    # from the residual in turn.
    pieces = []
    parts = list(s.parts)
    index = 0
    cursor = parts[0].lo if parts else Fraction(0)
    for size in sizes:
        taken = []
        remaining = size
        while remaining > 0:
            part = parts[index]
            available = part.hi - cursor
            if available <= remaining:
                taken.append(Interval(cursor, part.hi))
                remaining -= available
                index += 1
                if index < len(parts):
                    cursor = parts[index].lo
            else:
                taken.append(Interval(cursor, cursor + remaining))
                cursor += remaining
                remaining = Fraction(0)
        pieces.append(IntervalSet(tuple(taken)))
    return pieces
