# assessment_pipeline.py
# Survey -> per-group mass assignments -> combination -> integral assessment table.

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from config import PipelineConfig
from ds_combine import CombinationReport, combine_all
from ds_measures import expected_interval, focal_measures, most_probable
from errors import EmptyGroup, TotalConflict
from evidence_core import AssessmentKey, ResponseRecord, ResponseTally, bpa, group_records, tally_responses
from innovation_index import (
    WeightSpec,
    component_indices,
    grid_from_survey,
    integral_index,
    integral_index_interval,
)
from interval_scale import Scale
from logger_config import log_assessment_row, log_combination, log_index_result
from report_models import (
    AssessmentTable,
    CombinationSummary,
    ConflictRow,
    FocalRow,
    GroupTally,
    IntegralAssessmentRow,
    IntegralSummary,
)

logger = logging.getLogger(__name__)

Cell = Tuple[str, str]


@dataclass(frozen=True)
class CellInput:
    component_id: str
    indicator_id: str
    groups: Tuple[str, ...]
    records: Tuple[ResponseRecord, ...]


def _focal_rows(report: CombinationReport) -> List[FocalRow]:
    return [
        FocalRow(lo=fm.interval.lo, hi=fm.interval.hi, mass=fm.mass, bel=fm.bel, pl=fm.pl)
        for fm in focal_measures(report.combined)
    ]


def _conflict_rows(report: CombinationReport) -> List[ConflictRow]:
    return [
        ConflictRow(left_source=p.left_source, right_source=p.right_source, conflict=p.conflict)
        for p in report.pair_conflicts
    ]


def _tally_row(tally: ResponseTally) -> GroupTally:
    return GroupTally(
        group=tally.key.group_id,
        total=tally.total,
        counts={str(term): count for term, count in tally.sorted_counts()},
    )


def assess_cell(cell: CellInput, scale: Scale, config: PipelineConfig) -> IntegralAssessmentRow:
    """
    One row of the integral assessment: tally each group (groups in
    lexicographic order), assign masses, fold the groups with Dempster's rule
    and read off the most probable interval and the expected interval.

    Raises:
        TotalConflict: carries the "component/indicator" key of the cell
    """
    tallies = [
        tally_responses(cell.records, AssessmentKey(cell.component_id, cell.indicator_id, group))
        for group in cell.groups
    ]
    bodies = [bpa(t, scale, config.tolerance) for t in tallies]

    try:
        report = combine_all(bodies, config.tolerance, config.conflict_threshold)
    except TotalConflict as e:
        raise e.with_key(f"{cell.component_id}/{cell.indicator_id}") from None

    log_combination(
        logger,
        report.source_order,
        report.pair_conflicts,
        component=cell.component_id,
        indicator=cell.indicator_id,
    )

    best = most_probable(report.combined, scale, config.tolerance)
    expected = expected_interval(report.combined)
    top = best.terms[0] if best.terms else None

    return IntegralAssessmentRow(
        component_id=cell.component_id,
        indicator_id=cell.indicator_id,
        groups=list(cell.groups),
        tallies=[_tally_row(t) for t in tallies],
        focal=_focal_rows(report),
        chosen_lo=best.interval.lo,
        chosen_hi=best.interval.hi,
        label=best.label,
        label_score=top.score if top else 0.0,
        bel=best.measures.bel,
        pl=best.measures.pl,
        expected_lo=expected.lo,
        expected_hi=expected.hi,
        conflicts=_conflict_rows(report),
        irrelevant_count=sum(t.irrelevant_count for t in tallies),
    )


def plan_cells(records: Sequence[ResponseRecord], config: PipelineConfig) -> List[CellInput]:
    """
    Cells to assess, sorted by (component, indicator). When the config
    declares components and indicators every declared pair must have
    responses; responses outside the declared sets are ignored.

    Raises:
        EmptyGroup: a declared (component, indicator) has no responses
    """
    answered = group_records(records)
    by_cell: Dict[Cell, List[ResponseRecord]] = {}
    for record in records:
        by_cell.setdefault(record.key.cell, []).append(record)

    components = sorted(set(config.components)) if config.components else sorted({c for c, _ in answered})
    indicators = sorted(set(config.indicators)) if config.indicators else sorted({i for _, i in answered})

    cells = []
    for component in components:
        for indicator in indicators:
            groups = answered.get((component, indicator))
            if not groups:
                if config.components and config.indicators:
                    raise EmptyGroup(f"{component}/{indicator}: no responses for a declared cell")
                continue
            cells.append(CellInput(component, indicator, tuple(groups), tuple(by_cell[(component, indicator)])))

    ignored = set(answered) - {(c.component_id, c.indicator_id) for c in cells}
    if ignored:
        logger.warning(f"Ignoring responses for {len(ignored)} undeclared cell(s), first {sorted(ignored)[0]}")
    return cells


def integral_summary(
    records: Sequence[ResponseRecord],
    scale: Scale,
    weights: WeightSpec,
    config: PipelineConfig,
) -> IntegralSummary:
    """Index interval of the system from each group's expected appraisal interval."""
    grid = grid_from_survey(records, scale, config.tolerance)
    interval = integral_index_interval(grid, weights)
    summary = IntegralSummary(
        index_lo=interval.lo,
        index_hi=interval.hi,
        index=integral_index(grid, weights, config.scalarization),
        scalarization=config.scalarization.value,
        component_indices=component_indices(grid, weights, config.scalarization),
    )
    log_index_result(logger, summary, source="survey")
    return summary


def run_assessment(
    records: Sequence[ResponseRecord],
    scale: Scale,
    config: PipelineConfig,
    weights: Optional[WeightSpec] = None,
) -> AssessmentTable:
    """
    Integral assessment table of a survey; rows follow (component, indicator)
    order whatever the number of workers.
    """
    cells = plan_cells(records, config)
    logger.info(f"Assessing {len(cells)} cell(s) with {config.workers} worker(s)")

    if config.workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(lambda c: assess_cell(c, scale, config), cells))
    else:
        rows = [assess_cell(c, scale, config) for c in cells]

    for row in rows:
        log_assessment_row(logger, row)
        if row.irrelevant_count:
            logger.info(
                f"{row.component_id}/{row.indicator_id}: {row.irrelevant_count} 'irrelevant' response(s)"
            )

    integral = None
    if weights is not None:
        assessed = {(c.component_id, c.indicator_id) for c in cells}
        integral = integral_summary([r for r in records if r.key.cell in assessed], scale, weights, config)

    return AssessmentTable(rows=rows, integral=integral)


def combination_summary(report: CombinationReport) -> CombinationSummary:
    """Report form of a standalone combination."""
    expected = expected_interval(report.combined)
    return CombinationSummary(
        source_order=list(report.source_order),
        focal=_focal_rows(report),
        conflicts=_conflict_rows(report),
        expected_lo=expected.lo,
        expected_hi=expected.hi,
    )
