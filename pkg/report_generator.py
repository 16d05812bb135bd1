"""
Report Generator Module
Builds the JSON report for every CLI command and prints it as a sectioned console summary
"""
import json
import logging
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence

from config import DEFAULT_CONFIG
from continuous_allocator import Allocation
from convergence_analytics import StageAnalyzer, to_records
from discrete_matcher import DiscreteInstance, DiscreteSolution
from hall_certificates import Certificate, Instance, ViolatingSet
from instance_loader import InstanceLoader
from measure import format_rational
from oracle import ValidationReport
from venn_atoms import format_mask
from xi_emulator import LimitComparison, RefinementRun, XiStage

logger = logging.getLogger(__name__)


def certificate_to_dict(inst: Instance, certificate: ViolatingSet) -> Dict[str, Any]:
    """Violating set as report fields"""
    return {
        'mask': format_mask(certificate.i_set),
        'sets': [inst.names[k - 1] for k in certificate.indices],
        'lhs': format_rational(certificate.lhs),
        'rhs': format_rational(certificate.rhs),
        'deficit': format_rational(certificate.deficit),
    }


class ReportGenerator:
    """Collects the sections of one command's report"""

    def __init__(self, command: str, config: Optional[Dict[str, Any]] = None):
        self.command = command
        self.config = config or DEFAULT_CONFIG
        self.analyzer = StageAnalyzer()
        self.sections: Dict[str, Any] = {}
        self.verdict: Optional[str] = None
        self.seconds: Optional[float] = None

    def set_verdict(self, verdict: str, seconds: Optional[float] = None) -> None:
        self.verdict = verdict
        self.seconds = seconds

    def add_certificate(self, inst: Instance, certificate: Certificate, method: str = 'flow') -> None:
        """Verdict details from any checker"""
        self.sections['method'] = method
        if isinstance(certificate, ViolatingSet):
            self.sections['certificate'] = certificate_to_dict(inst, certificate)
        elif certificate.flow_value is not None:
            self.sections['flow_value'] = format_rational(certificate.flow_value)

    def add_allocation(self, inst: Instance, allocation: Allocation) -> None:
        self.sections['allocation'] = InstanceLoader.allocation_to_dict(inst.names, allocation.parts)
        self.sections['flow_value'] = format_rational(allocation.flow_value)
        self.sections['shares'] = [
            {'set': inst.names[k], 'atom': format_mask(mask), 'measure': format_rational(amount)}
            for (k, mask), amount in sorted(allocation.shares.items())
        ]

    def add_validation(self, validation: ValidationReport) -> None:
        self.sections['validation'] = {'verdict': validation.verdict, 'failures': list(validation.failures)}

    def add_stage(self, stage: XiStage, mode: Optional[str] = None) -> None:
        """One stage; unsolved stages keep their deflated demands and bounds for inspection"""
        if mode is not None:
            self.sections['mode'] = mode
        self.sections['xi'] = format_rational(stage.xi)
        self.sections['solved'] = stage.solved
        self.sections['above_threshold'] = stage.above_threshold
        self.sections['deflated_demands'] = list(stage.d_xi)
        self.sections['stage'] = to_records(self.analyzer.stage_table(stage))
        self.sections['gap_bounds'] = to_records(self.analyzer.gap_table(stage))
        if stage.solved:
            self.sections['allocation'] = InstanceLoader.allocation_to_dict(stage.instance.names, stage.b_xi)

    def add_refinement(self, run: RefinementRun, comparison: Optional[LimitComparison] = None) -> None:
        """Per-stage table plus the finite-stage comparison"""
        self.sections['mode'] = run.mode
        self.sections['xis'] = [format_rational(xi) for xi in run.xis]
        self.sections['stages'] = to_records(self.analyzer.refinement_table(run))
        self.sections['allocation'] = InstanceLoader.allocation_to_dict(run.instance.names, run.limit_b)
        if comparison is not None:
            self.sections['limit'] = {
                'passed': comparison.passed,
                'disjoint': comparison.disjoint,
                'final_xi': format_rational(comparison.final_xi),
                'rows': to_records(self.analyzer.limit_table(comparison)),
            }

    def add_discrete(self, inst: DiscreteInstance, solution: DiscreteSolution,
                     brute_force: Optional[bool] = None) -> None:
        if solution.feasible:
            self.sections['parts'] = [{'name': name, 'elements': list(part)}
                                      for name, part in zip(inst.names, solution.parts)]
        else:
            mask = solution.violating
            self.sections['certificate'] = {'mask': format_mask(mask),
                                            'union_size': inst.union_size(mask),
                                            'demand': inst.demand_of(mask)}
        if brute_force is not None:
            self.sections['brute_force_agrees'] = brute_force

    def add_error(self, exc: Exception) -> None:
        self.sections['error'] = {'code': getattr(exc, 'code', 'internal'), 'message': str(exc)}

    def add_batch(self, results: Sequence[Dict[str, Any]]) -> None:
        self.sections['summary'] = self.analyzer.batch_summary(results)
        self.sections['results'] = list(results)

    def generate_full_report(self) -> Dict[str, Any]:
        report = {
            'version': self.config['report_version'],
            'command': self.command,
            'generated_at': datetime.now().isoformat(),
            'verdict': self.verdict,
        }
        if self.seconds is not None:
            report['timing'] = {'seconds': round(self.seconds, 6)}
        report.update(self.sections)
        return report

    def to_json(self) -> str:
        return json.dumps(self.generate_full_report(), indent=4) + "\n"

    def save_report(self, filename: str) -> None:
        """Save the full report as JSON"""
        with open(filename, 'w') as f:
            f.write(self.to_json())
        logger.info("report saved to %s", filename)

    def print_report(self, quiet: bool = False) -> None:
        """Console summary; quiet prints the verdict alone"""
        report = self.generate_full_report()
        if quiet:
            print(report['verdict'])
            return

        print("\n" + "=" * 60)
        print(f"HALL MATCHING REPORT: {self.command.upper()}")
        print("=" * 60)
        print(f"\nVerdict: {report['verdict']}")
        if 'timing' in report:
            print(f"Time: {report['timing']['seconds']:.4f}s")
        if 'mode' in report:
            print(f"Mode: {report['mode']}")

        if 'certificate' in report:
            print("\nVIOLATING SET")
            print("-" * 40)
            for key, value in report['certificate'].items():
                print(f"{key.replace('_', ' ').title()}: {value}")

        if 'allocation' in report:
            print("\nALLOCATION")
            print("-" * 40)
            for part in report['allocation']['parts']:
                intervals = " ∪ ".join(f"[{lo}, {hi})" for lo, hi in part['intervals']) or "∅"
                print(f"{part['name']}: {intervals}  (measure {part['measure']})")

        if 'parts' in report:
            print("\nDISCRETE PARTS")
            print("-" * 40)
            for part in report['parts']:
                print(f"{part['name']}: {part['elements']}")

        if 'validation' in report:
            print("\nVALIDATION")
            print("-" * 40)
            print(report['validation']['verdict'])
            for failure in report['validation']['failures']:
                print(f"  - {failure}")

        for key in ('stages', 'stage', 'gap_bounds'):
            if key in report and report[key]:
                print(f"\n{key.replace('_', ' ').upper()}")
                print("-" * 40)
                self._print_rows(report[key])

        if 'summary' in report:
            print("\nBATCH SUMMARY")
            print("-" * 40)
            for key, value in report['summary'].items():
                print(f"{key.replace('_', ' ').title()}: {value}")

        if 'error' in report:
            print(f"\nERROR [{report['error']['code']}]: {report['error']['message']}")

        print("\n" + "=" * 60)

    @staticmethod
    def _print_rows(rows: List[Dict[str, Any]]) -> None:
        columns = list(rows[0].keys())
        print("  ".join(columns))
        for row in rows:
            print("  ".join(str(row[c]) for c in columns))

