"""
Command-line front end for the Hall matching toolkit
"""
import argparse
import logging
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

from config import DEFAULT_CONFIG, REFINE_MODES, get_config
from continuous_allocator import Allocation, allocate_exact
from discrete_matcher import DiscreteInstance, solve_discrete, solve_scaled, solve_transversal
from errors import HallMatchingError, InputError, InvariantViolationError, StageNotSolvableError
from hall_certificates import (
    Certificate,
    Instance,
    ViolatingSet,
    get_available_checkers,
    is_feasible,
    necessity_check,
)
from instance_generator import GENERATOR_MODES, generate
from instance_loader import InstanceLoader
from oracle import brute_force_discrete, oracle, validate
from report_generator import ReportGenerator
from venn_atoms import format_mask
from xi_emulator import compare_limit, discretize, refine, solve_stage

logger = logging.getLogger(__name__)

EXIT_FEASIBLE = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT_ERROR = 2
EXIT_INVARIANT = 3


def _read(path: str) -> str:
    try:
        with open(path) as f:
            return f.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _confirm_violation(inst: Instance, certificate: ViolatingSet) -> None:
    """Re-evaluate a certificate through plain set algebra"""
    lhs = inst.union_of(certificate.i_set).measure
    if not lhs < inst.demand_of(certificate.i_set) or lhs != certificate.lhs:
        raise InvariantViolationError(f"certificate {format_mask(certificate.i_set)} does not re-validate")


def _cross_check(inst: Instance, certificate: Certificate, config: Dict[str, Any]) -> None:
    """A second, independent verdict before a feasible exit"""
    if isinstance(certificate, ViolatingSet):
        _confirm_violation(inst, certificate)
        return
    if inst.n <= config['max_exhaustive_sets']:
        if not is_feasible(oracle(inst, config['max_exhaustive_sets'])):
            raise InvariantViolationError("oracle disagrees: instance is infeasible")


def _solved(inst: Instance, report: ReportGenerator, config: Dict[str, Any]):
    """allocate_exact plus every re-validation; returns the allocation or the certificate"""
    result = allocate_exact(inst)
    if isinstance(result, ViolatingSet):
        _confirm_violation(inst, result)
        return result
    validation = validate(inst, result.parts)
    report.add_validation(validation)
    if not validation.passed:
        raise InvariantViolationError("exact allocation failed validation: " + "; ".join(validation.failures))
    if necessity_check(inst, result.parts):
        raise InvariantViolationError("allocation breaks the necessity inequality")
    _cross_check(inst, result, config)
    return result


def cmd_check(args, config, report: ReportGenerator) -> int:
    """Decide the condition with the chosen checker"""
    inst = InstanceLoader.parse_instance(_read(args.instance))
    checker = get_available_checkers()[args.method]
    start = time.perf_counter()
    certificate = checker(inst)
    _cross_check(inst, certificate, config)
    report.add_certificate(inst, certificate, args.method)
    report.set_verdict(certificate.verdict, time.perf_counter() - start)
    return EXIT_FEASIBLE if is_feasible(certificate) else EXIT_INFEASIBLE


def cmd_solve(args, config, report: ReportGenerator) -> int:
    """Exact allocation, or a violating set re-checked by set algebra"""
    inst = InstanceLoader.parse_instance(_read(args.instance))
    start = time.perf_counter()
    result = _solved(inst, report, config)
    if isinstance(result, Allocation):
        report.add_allocation(inst, result)
    else:
        report.add_certificate(inst, result)
    report.set_verdict(result.verdict if isinstance(result, ViolatingSet) else 'feasible',
                       time.perf_counter() - start)
    return EXIT_FEASIBLE if isinstance(result, Allocation) else EXIT_INFEASIBLE


def cmd_emulate(args, config, report: ReportGenerator) -> int:
    """One discretization stage; unsolvable stages are still reported"""
    inst = InstanceLoader.parse_instance(_read(args.instance))
    start = time.perf_counter()
    exact = _solved(inst, report, config)
    if isinstance(exact, ViolatingSet):
        report.add_certificate(inst, exact)
        report.set_verdict('infeasible', time.perf_counter() - start)
        return EXIT_INFEASIBLE

    mode = args.mode or config['emulate_mode']
    stage = discretize(inst, args.xi)
    if any(d <= 0 for d in stage.d_xi):
        report.add_stage(stage, mode)
        raise StageNotSolvableError(f"deflated demands {list(stage.d_xi)} are not all positive at xi = {stage.xi}")
    stage = solve_stage(stage, mode=mode, exact=exact)
    report.add_stage(stage, mode)
    report.set_verdict('feasible', time.perf_counter() - start)
    return EXIT_FEASIBLE


def cmd_refine(args, config, report: ReportGenerator) -> int:
    """Nested stages down to xi / 2^steps, compared with the exact allocation"""
    inst = InstanceLoader.parse_instance(_read(args.instance))
    start = time.perf_counter()
    exact = _solved(inst, report, config)
    if isinstance(exact, ViolatingSet):
        report.add_certificate(inst, exact)
        report.set_verdict('infeasible', time.perf_counter() - start)
        return EXIT_INFEASIBLE

    steps = config['refine_steps'] if args.steps is None else args.steps
    run = refine(inst, args.xi, steps, args.mode or config['refine_mode'])
    comparison = compare_limit(run, exact)
    report.add_refinement(run, comparison)
    report.set_verdict('feasible', time.perf_counter() - start)
    if not comparison.passed:
        raise InvariantViolationError("final stage is outside the convergence bound")
    return EXIT_FEASIBLE


def cmd_discrete(args, config, report: ReportGenerator) -> int:
    """Finite-set matching, optionally checked by brute force"""
    text = _read(args.instance)
    inst = InstanceLoader.parse_discrete(text)
    xi = args.xi if args.xi is not None else InstanceLoader.parse_discrete_xi(text)
    start = time.perf_counter()
    if args.transversal:
        solution = solve_transversal(inst)
    elif xi is not None:
        solution = solve_scaled(inst, xi).solution
    else:
        solution = solve_discrete(inst)

    agrees = None
    if args.verify:
        if inst.n > config['max_exhaustive_sets']:
            raise InputError(f"--verify handles at most {config['max_exhaustive_sets']} sets")
        target = inst
        if args.transversal:
            target = DiscreteInstance(inst.ground, inst.subsets, (1,) * inst.n, inst.names)
        agrees = (brute_force_discrete(target) is not None) == solution.feasible
        if not agrees:
            raise InvariantViolationError("brute force disagrees with the matching verdict")
    report.add_discrete(inst, solution, agrees)
    report.set_verdict(solution.verdict, time.perf_counter() - start)
    return EXIT_FEASIBLE if solution.feasible else EXIT_INFEASIBLE


def cmd_gen(args, config, report: ReportGenerator) -> int:
    """Write a seeded instance to a file or stdout"""
    generated = generate(args.seed, args.n, args.mode, args.denom_cap)
    text = InstanceLoader.format_instance(generated.instance)
    if args.output:
        with open(args.output, 'w') as f:
            f.write(text)
        logger.info("instance written to %s", args.output)
    else:
        sys.stdout.write(text)
    return EXIT_FEASIBLE


def cmd_oracle(args, config, report: ReportGenerator) -> int:
    """Exhaustive check through pairwise unions only"""
    inst = InstanceLoader.parse_instance(_read(args.instance))
    start = time.perf_counter()
    certificate = oracle(inst, config['max_exhaustive_sets'])
    report.add_certificate(inst, certificate, 'oracle')
    report.set_verdict(certificate.verdict, time.perf_counter() - start)
    return EXIT_FEASIBLE if is_feasible(certificate) else EXIT_INFEASIBLE


def cmd_validate(args, config, report: ReportGenerator) -> int:
    """Check an allocation or a solve report against an instance"""
    inst = InstanceLoader.parse_instance(_read(args.instance))
    parts = InstanceLoader.parse_allocation(_read(args.allocation))
    validation = validate(inst, parts)
    report.add_validation(validation)
    report.set_verdict(validation.verdict)
    return EXIT_FEASIBLE if validation.passed else EXIT_INFEASIBLE


def run_instance(inst: Instance, config: Dict[str, Any], label: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Solve one instance, compare with the oracle and validate; one batch row"""
    row: Dict[str, Any] = dict(label or {})
    row['n'] = inst.n
    start = time.perf_counter()
    try:
        result = allocate_exact(inst)
        feasible = isinstance(result, Allocation)
        row['verdict'] = 'feasible' if feasible else 'infeasible'
        if inst.n <= config['max_exhaustive_sets']:
            row['agrees'] = is_feasible(oracle(inst, config['max_exhaustive_sets'])) == feasible
        else:
            row['agrees'] = True
        if feasible:
            row['validation'] = validate(inst, result.parts).verdict
        else:
            row['validation'] = 'pass' if inst.union_of(result.i_set).measure < result.rhs else 'fail'
            row['mask'] = format_mask(result.i_set)
    except HallMatchingError as exc:
        logger.error("batch item failed: %s", exc)
        row.update({'verdict': 'error', 'agrees': False, 'validation': 'fail', 'error': exc.code})
    row['seconds'] = time.perf_counter() - start
    return row


def run_batch(seeds: Sequence[int], n: int, modes: Sequence[str], denom_cap: Optional[int],
              config: Dict[str, Any]) -> List[Dict[str, Any]]:
    """Generated instances, cycling through the modes"""
    rows = []
    for index, seed in enumerate(seeds):
        mode = modes[index % len(modes)]
        generated = generate(seed, n, mode, denom_cap)
        rows.append(run_instance(generated.instance, config, {'seed': seed, 'mode': mode}))
    return rows


def cmd_batch(args, config, report: ReportGenerator) -> int:
    """Solve files or generated instances and summarize the agreement"""
    start = time.perf_counter()
    if args.files:
        rows = [run_instance(InstanceLoader.parse_instance(_read(path)), config, {'file': path})
                for path in args.files]
    else:
        modes = GENERATOR_MODES if args.mode == 'mixed' else (args.mode,)
        rows = run_batch(range(args.start, args.start + args.count), args.n, modes, args.denom_cap, config)
    report.add_batch(rows)
    summary = report.sections['summary']
    clean = summary['disagreements'] == 0 and summary['validation_failures'] == 0
    report.set_verdict('pass' if clean else 'fail', time.perf_counter() - start)
    return EXIT_FEASIBLE if clean else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation"""
    parser = argparse.ArgumentParser(prog='hall-matching',
                                     description='Exact measure-theoretic Hall matching on interval sets')
    parser.add_argument('--quiet', action='store_true', help='print the verdict only')
    parser.add_argument('--verbose', action='store_true', help='debug logging')
    parser.add_argument('--report', help='write the JSON report to this file')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('check', help='decide the Hall condition')
    p.add_argument('instance')
    p.add_argument('--method', choices=sorted(get_available_checkers()), default='flow')
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser('solve', help='build the exact allocation or a violating set')
    p.add_argument('instance')
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser('emulate', help='one discretization stage')
    p.add_argument('instance')
    p.add_argument('--xi', required=True)
    p.add_argument('--mode', choices=REFINE_MODES)
    p.set_defaults(handler=cmd_emulate)

    p = sub.add_parser('refine', help='nested stages for xi / 2^i')
    p.add_argument('instance')
    p.add_argument('--xi', help='starting xi, default the positivity threshold')
    p.add_argument('--steps', type=int)
    p.add_argument('--mode', choices=REFINE_MODES)
    p.set_defaults(handler=cmd_refine)

    p = sub.add_parser('discrete', help='finite-set matching')
    p.add_argument('instance')
    p.add_argument('--xi', help='uniform weight per element')
    p.add_argument('--transversal', action='store_true', help='one representative per set')
    p.add_argument('--verify', action='store_true', help='cross-check by brute force')
    p.set_defaults(handler=cmd_discrete)

    p = sub.add_parser('gen', help='generate a random instance')
    p.add_argument('--seed', type=int, required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--mode', choices=GENERATOR_MODES, default='feasible')
    p.add_argument('--denom-cap', type=int, default=DEFAULT_CONFIG['default_denom_cap'])
    p.add_argument('-o', '--output')
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser('oracle', help='exhaustive check by plain set algebra')
    p.add_argument('instance')
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser('validate', help='check an allocation or solve report against an instance')
    p.add_argument('instance')
    p.add_argument('allocation')
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser('batch', help='solve many instances and cross-check with the oracle')
    p.add_argument('files', nargs='*')
    p.add_argument('--count', type=int, default=100)
    p.add_argument('--start', type=int, default=0)
    p.add_argument('--n', type=int, default=3)
    p.add_argument('--mode', choices=GENERATOR_MODES + ('mixed',), default='mixed')
    p.add_argument('--denom-cap', type=int, default=DEFAULT_CONFIG['default_denom_cap'])
    p.set_defaults(handler=cmd_batch)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code"""
    args = build_parser().parse_args(argv)
    level = 'DEBUG' if args.verbose else 'WARNING' if args.quiet else DEFAULT_CONFIG['log_level']
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s %(message)s')

    report = ReportGenerator(args.command)
    try:
        config = get_config()
        code = args.handler(args, config, report)
    except InputError as exc:
        logger.error("input error [%s]: %s", exc.code, exc)
        report.add_error(exc)
        report.set_verdict('error')
        code = EXIT_INPUT_ERROR
    except HallMatchingError as exc:
        logger.error("invariant violation [%s]: %s", exc.code, exc)
        report.add_error(exc)
        report.set_verdict('error')
        code = EXIT_INVARIANT

    if args.command != 'gen':
        report.print_report(quiet=args.quiet)
        if args.report:
            report.save_report(args.report)
    return code


if __name__ == "__main__":
    sys.exit(main())
