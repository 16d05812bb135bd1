"""
Instance Loader Module
Reads and writes instance, discrete-instance and allocation files (JSON with rational strings)
"""
import json
import logging
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar

from config import DEFAULT_CONFIG
from discrete_matcher import DiscreteInstance
from errors import InputError, InstanceFormatError
from hall_certificates import Instance
from measure import Interval, IntervalSet, format_rational, parse_rational

logger = logging.getLogger(__name__)

T = TypeVar('T')


def _at(path: str, build: Callable[[], T]) -> T:
    """Run build, re-raising input errors with the field path attached"""
    try:
        return build()
    except InstanceFormatError:
        raise
    except InputError as exc:
        raise type(exc)(str(exc), context=path) from exc


def _require(obj: Dict[str, Any], key: str, kind: type, path: str = "") -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise InstanceFormatError(f"missing field {key!r}", context=path or None)
    value = obj[key]
    if not isinstance(value, kind):
        raise InstanceFormatError(f"{key!r} must be a {kind.__name__}", context=f"{path}{key}")
    return value


class InstanceLoader:
    """Parses and prints the on-disk formats"""

    @staticmethod
    def _decode(text: str) -> Dict[str, Any]:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(exc.msg, context=f"line {exc.lineno}, column {exc.colno}") from exc
        if not isinstance(data, dict):
            raise InstanceFormatError("top level must be an object")
        return data

    @staticmethod
    def _check_version(data: Dict[str, Any], expected: str) -> None:
        version = data.get('version', expected)
        if version != expected:
            raise InstanceFormatError(f"unsupported version {version!r}, expected {expected!r}",
                                      context="version")

    @staticmethod
    def parse_intervals(pairs: Any, path: str) -> IntervalSet:
        if not isinstance(pairs, list):
            raise InstanceFormatError("expected a list of [lo, hi] pairs", context=path)
        parts = []
        for index, pair in enumerate(pairs):
            where = f"{path}[{index}]"
            if not isinstance(pair, list) or len(pair) != 2:
                raise InstanceFormatError("expected [lo, hi]", context=where)
            parts.append(_at(where, lambda: Interval(parse_rational(pair[0]), parse_rational(pair[1]))))
        return IntervalSet(tuple(parts))

    @staticmethod
    def format_intervals(s: IntervalSet) -> List[List[str]]:
        return [[format_rational(lo), format_rational(hi)] for lo, hi in s.to_pairs()]

    @staticmethod
    def parse_instance(text: str) -> Instance:
        """Instance from JSON text; errors name the field or line"""
        data = InstanceLoader._decode(text)
        InstanceLoader._check_version(data, DEFAULT_CONFIG['instance_version'])

        universe = InstanceLoader.parse_intervals(_require(data, 'universe', list), "universe")
        sets = _require(data, 'sets', list)
        demands = _require(data, 'demands', list)
        if len(demands) != len(sets):
            raise InstanceFormatError(f"{len(sets)} sets but {len(demands)} demands", context="demands")

        names, subsets = [], []
        for index, entry in enumerate(sets):
            path = f"sets[{index}]"
            pairs = _require(entry, 'intervals', list, f"{path}.")
            names.append(str(entry.get('name', f"A{index + 1}")))
            subsets.append(InstanceLoader.parse_intervals(pairs, f"{path}.intervals"))
        values = [_at(f"demands[{index}]", lambda: parse_rational(value))
                  for index, value in enumerate(demands)]

        inst = Instance.build(universe, subsets, values, names)
        logger.debug("parsed instance with %d sets", inst.n)
        return inst

    @staticmethod
    def instance_to_dict(inst: Instance) -> Dict[str, Any]:
        return {
            'version': DEFAULT_CONFIG['instance_version'],
            'universe': InstanceLoader.format_intervals(inst.universe),
            'sets': [{'name': name, 'intervals': InstanceLoader.format_intervals(s)}
                     for name, s in zip(inst.names, inst.subsets)],
            'demands': [format_rational(m) for m in inst.demands],
        }

    @staticmethod
    def format_instance(inst: Instance) -> str:
        """Canonical JSON text, stable under a parse round trip"""
        return json.dumps(InstanceLoader.instance_to_dict(inst), indent=2) + "\n"

    @staticmethod
    def parse_discrete(text: str) -> DiscreteInstance:
        """DiscreteInstance from JSON text"""
        data = InstanceLoader._decode(text)
        InstanceLoader._check_version(data, DEFAULT_CONFIG['discrete_version'])

        ground = _require(data, 'ground', list)
        for index, element in enumerate(ground):
            if isinstance(element, bool) or not isinstance(element, (int, str)):
                raise InstanceFormatError("elements must be integers or strings", context=f"ground[{index}]")
        sets = _require(data, 'sets', list)
        demands = _require(data, 'demands', list)
        for index, demand in enumerate(demands):
            if isinstance(demand, bool) or not isinstance(demand, int):
                raise InstanceFormatError("demands must be integers", context=f"demands[{index}]")

        names, subsets = [], []
        for index, entry in enumerate(sets):
            elements = _require(entry, 'elements', list, f"sets[{index}].")
            names.append(str(entry.get('name', f"A{index + 1}")))
            subsets.append(frozenset(elements))
        return DiscreteInstance(ground=tuple(ground), subsets=tuple(subsets),
                                demands=tuple(demands), names=tuple(names))

    @staticmethod
    def parse_discrete_xi(text: str) -> Optional[Fraction]:
        """Optional uniform weight stored beside a discrete instance"""
        data = InstanceLoader._decode(text)
        if 'xi' not in data:
            return None
        return _at("xi", lambda: parse_rational(data['xi']))

    @staticmethod
    def allocation_to_dict(names: Sequence[str], parts: Sequence[IntervalSet]) -> Dict[str, Any]:
        """Allocation file contents for the named parts"""
        return {
            'version': DEFAULT_CONFIG['allocation_version'],
            'parts': [{'name': name,
                       'intervals': InstanceLoader.format_intervals(part),
                       'measure': format_rational(part.measure)}
                      for name, part in zip(names, parts)],
        }

    @staticmethod
    def parse_allocation(text: str) -> List[IntervalSet]:
        """Accepts an allocation file or a solve report that embeds one"""
        data = InstanceLoader._decode(text)
        if 'allocation' in data:
            data = data['allocation']
            if not isinstance(data, dict):
                raise InstanceFormatError("report holds no allocation", context="allocation")
        InstanceLoader._check_version(data, DEFAULT_CONFIG['allocation_version'])
        parts = _require(data, 'parts', list)
        return [InstanceLoader.parse_intervals(_require(entry, 'intervals', list, f"parts[{index}]."),
                                               f"parts[{index}].intervals")
                for index, entry in enumerate(parts)]

    @staticmethod
    def load_instance(path: str) -> Instance:
        with open(path) as f:
            return InstanceLoader.parse_instance(f.read())

    @staticmethod
    def save_instance(inst: Instance, path: str) -> None:
        """Write the canonical JSON for an instance"""
        with open(path, 'w') as f:
            f.write(InstanceLoader.format_instance(inst))
        logger.info("instance saved to %s", path)


parse_instance = InstanceLoader.parse_instance
format_instance = InstanceLoader.format_instance
