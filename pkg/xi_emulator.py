"""
Xi Emulator Module
Runs the ξ-discretization argument step by step: carve each atom into measure-ξ blocks,
deflate the demands, match blocks, then refine ξ_i = ξ/2^i with nested solutions
"""
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from config import DEFAULT_CONFIG, REFINE_MODES
from continuous_allocator import Allocation, allocate_exact
from discrete_matcher import solve_blocks
from errors import (
    ConfigError,
    EmptySubsetError,
    InfeasibleInstanceError,
    InstanceMismatchError,
    InvariantViolationError,
    NestingInfeasibleError,
    NonpositiveXiError,
    StageNotSolvableError,
)
from hall_certificates import Instance, check_flow, is_feasible
from measure import IntervalSet, RationalLike, carve, parse_rational, partition, union_all
from venn_atoms import AtomTable, all_masks, atomize, format_mask, mask_members, popcount

logger = logging.getLogger(__name__)

BlockId = Tuple[int, int]   # (atom mask, position of the block inside E_{Q,ξ})


@dataclass(frozen=True)
class XiStage:
    instance: Instance
    table: AtomTable
    xi: Fraction
    e_table: Dict[int, IntervalSet]
    blocks: Dict[int, List[IntervalSet]]
    a_xi: Tuple[IntervalSet, ...]
    d_xi: Tuple[int, ...]
    above_threshold: bool = False
    b_xi: Optional[Tuple[IntervalSet, ...]] = None
    chosen: Optional[Tuple[FrozenSet[BlockId], ...]] = None

    @property
    def solved(self) -> bool:
        return self.b_xi is not None

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def block_count(self) -> int:
        return sum(len(blocks) for blocks in self.blocks.values())

    def block_ids(self) -> List[BlockId]:
        """Every block, atoms in mask order, blocks left to right"""
        return [(mask, j) for mask, blocks in self.blocks.items() for j in range(len(blocks))]

    def block(self, block_id: BlockId) -> IntervalSet:
        mask, j = block_id
        return self.blocks[mask][j]


@dataclass(frozen=True)
class GapBound:
    mask: int
    actual: Fraction
    bound: Fraction


@dataclass(frozen=True)
class StageFeasibility:
    """ν(∪_{i∈Q} A_{i,ξ}) against ξ Σ_{i∈Q} d_{i,ξ}"""

    mask: int
    covered: Fraction
    required: Fraction

    @property
    def holds(self) -> bool:
        return self.covered >= self.required

    @property
    def strict(self) -> bool:
        return self.covered > self.required


@dataclass
class RefinementRun:
    instance: Instance
    mode: str
    stages: List[XiStage] = field(default_factory=list)
    limit_b: Tuple[IntervalSet, ...] = ()

    @property
    def xis(self) -> List[Fraction]:
        return [stage.xi for stage in self.stages]

    @property
    def final_xi(self) -> Fraction:
        return self.stages[-1].xi


@dataclass(frozen=True)
class LimitRow:
    k: int
    demand: Fraction
    limit_measure: Fraction
    gap: Fraction
    bound: Fraction
    limit_subset: bool
    exact_gap: Fraction
    inside_exact: bool

    @property
    def within_bound(self) -> bool:
        return self.gap <= self.bound


@dataclass(frozen=True)
class LimitComparison:
    rows: Tuple[LimitRow, ...]
    disjoint: bool
    final_xi: Fraction

    @property
    def passed(self) -> bool:
        return self.disjoint and all(row.limit_subset and row.within_bound and row.exact_gap == 0
                                     for row in self.rows)


def positivity_slack(n: int) -> int:
    """2^{n+1}: blocks held back from every demand"""
    return 2 ** (n + 1)


def xi_threshold(inst: Instance) -> Fraction:
    """Largest ξ for which every d_{k,ξ} is guaranteed positive"""
    return min(inst.demands) / (positivity_slack(inst.n) + 1)


def discretize(inst: Instance, xi: RationalLike, table: Optional[AtomTable] = None) -> XiStage:
    """Carve every atom to a multiple of xi, split it into blocks, deflate the demands"""
    step = parse_rational(xi)
    if step <= 0:
        raise NonpositiveXiError(f"xi must be positive, got {step}")
    table = atomize(inst.subsets) if table is None else table
    above = step > xi_threshold(inst)
    if above:
        logger.warning("xi = %s is above the positivity threshold %s; demands may be nonpositive",
                       step, xi_threshold(inst))

    e_table: Dict[int, IntervalSet] = {}
    blocks: Dict[int, List[IntervalSet]] = {}
    for mask, atom in table.items():
        count = atom.measure // step
        e_table[mask] = carve(atom, step * count)
        blocks[mask] = partition(e_table[mask], [step] * count) if count else []

    a_xi = tuple(union_all(e_table[mask] for mask in table.masks_containing(k)) for k in range(inst.n))
    d_xi = tuple(int(m // step) - positivity_slack(inst.n) for m in inst.demands)
    logger.debug("xi = %s: %d blocks, demands %s", step, sum(len(b) for b in blocks.values()), d_xi)
    return XiStage(instance=inst, table=table, xi=step, e_table=e_table, blocks=blocks,
                   a_xi=a_xi, d_xi=d_xi, above_threshold=above)


def stage_gap_bound(stage: XiStage, i_set: int) -> GapBound:
    """ν(∪A_i) − ν(∪A_{i,ξ}) against ξ(2^n − 2^{n−|Q|}) for the sets in Q"""
    if i_set <= 0:
        raise EmptySubsetError("index set must be nonempty")
    inst = stage.instance
    members = mask_members(i_set)
    actual = inst.union_of(i_set).measure - union_all(stage.a_xi[k] for k in members).measure
    bound = stage.xi * (2 ** inst.n - 2 ** (inst.n - popcount(i_set)))

    if actual < 0:
        raise InvariantViolationError(f"A_xi union exceeds A union on {format_mask(i_set)}")
    meets = any(mask & i_set for mask in stage.table.masks())
    if meets and not actual < bound:
        raise InvariantViolationError(
            f"gap {actual} is not below {bound} on {format_mask(i_set)} at xi = {stage.xi}")
    return GapBound(mask=i_set, actual=actual, bound=bound)


def stage_feasibility(stage: XiStage) -> List[StageFeasibility]:
    """The stage inequality for every nonempty mask"""
    rows = []
    for mask in all_masks(stage.n):
        members = mask_members(mask)
        covered = union_all(stage.a_xi[k] for k in members).measure
        required = stage.xi * sum(stage.d_xi[k] for k in members)
        rows.append(StageFeasibility(mask=mask, covered=covered, required=required))
    return rows


def _full_collections(stage: XiStage, ids: Sequence[BlockId]) -> List[List[int]]:
    return [[index for index, (mask, _) in enumerate(ids) if mask >> k & 1] for k in range(stage.n)]


def _anchored_collections(stage: XiStage, ids: Sequence[BlockId], exact: Allocation) -> List[List[int]]:
    """Blocks lying wholly inside demand k's share of each atom"""
    owner: Dict[BlockId, int] = {}
    for mask in stage.blocks:
        for k, start, stop in exact.share_ranges(mask):
            for j in range(math.ceil(start / stage.xi), math.floor(stop / stage.xi)):
                owner[(mask, j)] = k
    return [[index for index, block_id in enumerate(ids) if owner.get(block_id) == k]
            for k in range(stage.n)]


def _collections(stage: XiStage, ids: Sequence[BlockId], mode: str,
                 exact: Optional[Allocation]) -> List[List[int]]:
    if mode == 'anchored':
        return _anchored_collections(stage, ids, exact)
    return _full_collections(stage, ids)


def _verify_solved(stage: XiStage) -> None:
    inst = stage.instance
    for k, region in enumerate(stage.b_xi):
        if region.measure != stage.xi * stage.d_xi[k]:
            raise InvariantViolationError(f"ν(B_{k + 1}) = {region.measure}, expected ξ d = "
                                          f"{stage.xi * stage.d_xi[k]}")
        if not region.issubset(stage.a_xi[k]) or not stage.a_xi[k].issubset(inst.subsets[k]):
            raise InvariantViolationError(f"B_{k + 1} escapes A_{k + 1} at xi = {stage.xi}")
    if union_all(stage.b_xi).measure != sum((b.measure for b in stage.b_xi), Fraction(0)):
        raise InvariantViolationError(f"stage regions overlap at xi = {stage.xi}")


def _check_gap(stage: XiStage) -> None:
    allowance = stage.xi * (positivity_slack(stage.n) + 1)
    for k, (demand, region) in enumerate(zip(stage.instance.demands, stage.b_xi)):
        if demand - region.measure > allowance:
            raise InvariantViolationError(
                f"m_{k + 1} - ν(B) = {demand - region.measure} exceeds {allowance} at xi = {stage.xi}")


def _require_positive(stage: XiStage) -> None:
    if any(d <= 0 for d in stage.d_xi):
        raise StageNotSolvableError(f"deflated demands {stage.d_xi} are not all positive at xi = {stage.xi}")


def _match(stage: XiStage, ids: Sequence[BlockId], collections: List[List[int]],
           demands: Sequence[int]):
    """Solve only the demands that still need blocks"""
    active = [k for k, d in enumerate(demands) if d > 0]
    if not active:
        return [[] for _ in demands], None
    blocks = [stage.block(block_id) for block_id in ids]
    # stage blocks come from partition, so skip the disjointness re-check
    result = solve_blocks(blocks, [collections[k] for k in active], [demands[k] for k in active],
                          verify=False)
    if not result.feasible:
        violating = 0
        for bit, k in enumerate(active):
            if result.solution.violating >> bit & 1:
                violating |= 1 << k
        return None, violating
    picked = [[] for _ in demands]
    for k, part in zip(active, result.solution.parts):
        picked[k] = [ids[index] for index in part]
    return picked, None


def _with_choice(stage: XiStage, chosen: Sequence[FrozenSet[BlockId]]) -> XiStage:
    regions = tuple(union_all(stage.block(block_id) for block_id in sorted(ids)) for ids in chosen)
    solved = replace(stage, b_xi=regions, chosen=tuple(chosen))
    _verify_solved(solved)
    return solved


def solve_stage(stage: XiStage, mode: str = 'free', exact: Optional[Allocation] = None) -> XiStage:
    """Match the stage's blocks against d_{k,ξ}; B_{k,ξ} is the union of k's blocks"""
    _require_positive(stage)
    ids = stage.block_ids()
    picked, violating = _match(stage, ids, _collections(stage, ids, mode, exact), stage.d_xi)
    if picked is None:
        feasible = is_feasible(check_flow(stage.instance, stage.table))
        if feasible and not stage.above_threshold:
            raise InvariantViolationError(
                f"stage at xi = {stage.xi} reported violating mask {format_mask(violating)} "
                f"although the instance is feasible")
        raise StageNotSolvableError(f"no block matching at xi = {stage.xi}: "
                                    f"mask {format_mask(violating)} is short")
    solved = _with_choice(stage, [frozenset(p) for p in picked])
    logger.info("solved stage xi = %s with %d blocks", stage.xi, stage.block_count)
    return solved


def _refine_step(prev: XiStage, stage: XiStage, index: int, mode: str,
                 exact: Optional[Allocation]) -> XiStage:
    """Keep every block the previous stage chose (as two halves) and match only the increment"""
    _require_positive(stage)
    for k in range(stage.n):
        if stage.xi * stage.d_xi[k] < prev.xi * prev.d_xi[k]:
            raise InvariantViolationError(f"ξ d for set {k + 1} decreased at stage {index}")

    kept: List[set] = []
    for k, ids in enumerate(prev.chosen):
        halves = set()
        for mask, j in ids:
            if 2 * j + 1 >= len(stage.blocks[mask]):
                raise InvariantViolationError(f"block {j} of atom {format_mask(mask)} has no halves")
            halves.update({(mask, 2 * j), (mask, 2 * j + 1)})
        kept.append(halves)

    taken = set().union(*kept)
    remaining = [block_id for block_id in stage.block_ids() if block_id not in taken]
    increments = [d - len(ids) for d, ids in zip(stage.d_xi, kept)]
    picked, violating = _match(stage, remaining, _collections(stage, remaining, mode, exact), increments)
    if picked is None:
        dump = {
            'xi': str(stage.xi),
            'demands': list(stage.d_xi),
            'increments': increments,
            'kept': [len(ids) for ids in kept],
            'remaining_blocks': len(remaining),
            'violating_mask': format_mask(violating),
        }
        logger.error("nesting step failed at stage %d: %s", index, dump)
        raise NestingInfeasibleError(f"cannot extend the previous stage: mask {format_mask(violating)} "
                                     f"is short of blocks", stage_index=index, dump=dump)

    solved = _with_choice(stage, [frozenset(kept[k] | set(picked[k])) for k in range(stage.n)])
    for k in range(stage.n):
        if not prev.b_xi[k].issubset(solved.b_xi[k]):
            raise InvariantViolationError(f"B_{k + 1} at stage {index} does not contain stage {index - 1}")
    logger.debug("stage %d: increments %s", index, increments)
    return solved


def refine(inst: Instance, xi0: Optional[RationalLike] = None, steps: Optional[int] = None,
           mode: Optional[str] = None) -> RefinementRun:
    """Nested stages for ξ_i = ξ_0 / 2^i, i = 0..steps"""
    mode = mode or DEFAULT_CONFIG['refine_mode']
    steps = DEFAULT_CONFIG['refine_steps'] if steps is None else steps
    if mode not in REFINE_MODES:
        raise ConfigError(f"refine mode must be one of {REFINE_MODES}, got {mode!r}")
    if steps < 0:
        raise ConfigError(f"steps must be nonnegative, got {steps}")
    threshold = xi_threshold(inst)
    xi0 = threshold if xi0 is None else parse_rational(xi0)
    if xi0 <= 0:
        raise NonpositiveXiError(f"xi must be positive, got {xi0}")
    if xi0 > threshold:
        raise StageNotSolvableError(f"xi = {xi0} exceeds the positivity threshold {threshold}")

    table = atomize(inst.subsets)
    exact = allocate_exact(inst, table)
    if not isinstance(exact, Allocation):
        raise InfeasibleInstanceError(f"instance violates the condition on {format_mask(exact.i_set)}")

    run = RefinementRun(instance=inst, mode=mode)
    stage = solve_stage(discretize(inst, xi0, table), mode=mode, exact=exact)
    _check_gap(stage)
    run.stages.append(stage)
    for index in range(1, steps + 1):
        nxt = discretize(inst, xi0 / 2 ** index, table)
        stage = _refine_step(stage, nxt, index, mode, exact)
        _check_gap(stage)
        run.stages.append(stage)

    run.limit_b = stage.b_xi
    logger.info("refined %d stages in %s mode down to xi = %s", steps + 1, mode, stage.xi)
    return run


def compare_limit(run: RefinementRun, exact: Allocation) -> LimitComparison:
    """Finite-stage comparison: gaps stay within ξ_T(2^{n+1}+1); the limit is never claimed"""
    inst = run.instance
    if len(exact.parts) != inst.n:
        raise InstanceMismatchError(f"allocation has {len(exact.parts)} parts for {inst.n} sets")
    for k, part in enumerate(exact.parts):
        if not part.issubset(inst.subsets[k]) or part.measure != inst.demands[k]:
            raise InstanceMismatchError(f"allocation part {k + 1} does not belong to this instance")

    bound = run.final_xi * (positivity_slack(inst.n) + 1)
    rows = []
    for k, (demand, limit) in enumerate(zip(inst.demands, run.limit_b)):
        rows.append(LimitRow(k=k, demand=demand, limit_measure=limit.measure,
                             gap=demand - limit.measure, bound=bound,
                             limit_subset=limit.issubset(inst.subsets[k]),
                             exact_gap=demand - exact.parts[k].measure,
                             inside_exact=limit.issubset(exact.parts[k])))
    disjoint = union_all(run.limit_b).measure == sum((b.measure for b in run.limit_b), Fraction(0))
    return LimitComparison(rows=tuple(rows), disjoint=disjoint, final_xi=run.final_xi)
