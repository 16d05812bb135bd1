"""
Convergence analytics for the ξ-discretization runs
"""
import logging
from fractions import Fraction
from typing import Any, Dict, List, Sequence

import pandas as pd

from measure import format_rational
from venn_atoms import all_masks, format_mask
from xi_emulator import (
    LimitComparison,
    RefinementRun,
    XiStage,
    positivity_slack,
    stage_feasibility,
    stage_gap_bound,
)

logger = logging.getLogger(__name__)


class StageAnalyzer:
    """Tables over stages, masks and batch results"""

    def stage_table(self, stage: XiStage, index: int = 0) -> pd.DataFrame:
        """One row per demand of a solved stage"""
        inst = stage.instance
        allowance = stage.xi * (positivity_slack(inst.n) + 1)
        rows = []
        for k in range(inst.n):
            measure = stage.b_xi[k].measure if stage.solved else None
            rows.append({
                'stage': index,
                'k': k + 1,
                'xi': stage.xi,
                'd': stage.d_xi[k],
                'demand': inst.demands[k],
                'a_xi_measure': stage.a_xi[k].measure,
                'b_measure': measure,
                'gap': None if measure is None else inst.demands[k] - measure,
                'bound': allowance,
            })
        return pd.DataFrame(rows)

    def refinement_table(self, run: RefinementRun) -> pd.DataFrame:
        """Per stage × k: measures, gap against ξ_i(2^{n+1}+1), nesting and monotonicity flags"""
        if not run.stages:
            return pd.DataFrame()
        frames = [self.stage_table(stage, index) for index, stage in enumerate(run.stages)]
        table = pd.concat(frames, ignore_index=True)

        n = run.instance.n
        nested = [True] * len(table)
        monotone = [True] * len(table)
        for index in range(1, len(run.stages)):
            prev, stage = run.stages[index - 1], run.stages[index]
            for k in range(n):
                row = index * n + k
                nested[row] = prev.b_xi[k].issubset(stage.b_xi[k])
                monotone[row] = stage.b_xi[k].measure >= prev.b_xi[k].measure
        table['nested'] = nested
        table['monotone'] = monotone
        table['within_bound'] = [gap is not None and gap <= bound
                                 for gap, bound in zip(table['gap'], table['bound'])]
        return table

    def gap_table(self, stage: XiStage) -> pd.DataFrame:
        """Per nonempty mask: the union-loss bound and the stage feasibility inequality"""
        feasibility = {row.mask: row for row in stage_feasibility(stage)}
        rows = []
        for mask in all_masks(stage.n):
            gap = stage_gap_bound(stage, mask)
            row = feasibility[mask]
            rows.append({
                'mask': format_mask(mask),
                'gap': gap.actual,
                'gap_bound': gap.bound,
                'covered': row.covered,
                'required': row.required,
                'holds': row.holds,
                'strict': row.strict,
            })
        return pd.DataFrame(rows)

    def limit_table(self, comparison: LimitComparison) -> pd.DataFrame:
        """Per-demand gaps at the final stage"""
        return pd.DataFrame([{
            'k': row.k + 1,
            'demand': row.demand,
            'limit_measure': row.limit_measure,
            'gap': row.gap,
            'bound': row.bound,
            'within_bound': row.within_bound,
            'inside_exact': row.inside_exact,
        } for row in comparison.rows])

    def batch_summary(self, results: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
        """Verdict counts, disagreements, validation failures and timing over a batch"""
        if not results:
            return {'instances': 0, 'feasible': 0, 'infeasible': 0, 'errors': 0,
                    'disagreements': 0, 'validation_failures': 0, 'total_seconds': 0.0}
        df = pd.DataFrame(results)
        verdicts = df['verdict'].value_counts()
        summary = {
            'instances': int(len(df)),
            'feasible': int(verdicts.get('feasible', 0)),
            'infeasible': int(verdicts.get('infeasible', 0)),
            'errors': int(verdicts.get('error', 0)),
            'disagreements': int((~df['agrees']).sum()),
            'validation_failures': int((df['validation'] == 'fail').sum()),
            'total_seconds': float(df['seconds'].sum()),
            'max_seconds': float(df['seconds'].max()),
        }
        if 'mode' in df:
            summary['by_mode'] = {mode: int(count) for mode, count in df['mode'].value_counts().items()}
        if summary['disagreements']:
            logger.warning("%d disagreements between solver and oracle", summary['disagreements'])
        return summary


def to_records(table: pd.DataFrame) -> List[Dict[str, Any]]:
    """Rows as plain dicts with rationals printed as strings"""
    def cell(value):
        if isinstance(value, Fraction):
            return format_rational(value)
        if hasattr(value, 'item'):
            return value.item()
        return value

    return [{key: cell(value) for key, value in row.items()} for row in table.to_dict('records')]
