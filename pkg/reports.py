# reports.py
# CSV and JSON renderings of every command's report. Numbers are rounded to
# 6 decimals (half-even); CSV uses "\n" line endings; nothing time-dependent.

import csv
import io
import json
from typing import Any, Iterable, List, Sequence

from interval_scale import Scale
from report_models import (
    AssessmentTable,
    CombinationSummary,
    IndexReport,
    NoveltyReport,
    TrendRow,
    fmt,
    rounded,
)


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def _round_floats(value: Any) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return rounded(value)
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_round_floats(v) for v in value]
    return value


def _json(payload: Any) -> str:
    if hasattr(payload, "model_dump"):
        payload = payload.model_dump(mode="json")
    return json.dumps(_round_floats(payload), indent=2, ensure_ascii=False) + "\n"


def _opt(value) -> str:
    return "" if value is None else fmt(value)


# ----------------
# assess
# ----------------
ASSESSMENT_HEADER = [
    "component", "indicator", "groups", "responses", "tallies", "focal",
    "chosen_lo", "chosen_hi", "label", "label_score", "bel", "pl",
    "expected_lo", "expected_hi", "conflicts", "irrelevant",
]


def render_assessment(table: AssessmentTable, output_format: str) -> str:
    if output_format == "json":
        return _json(table)

    rows = []
    for row in table.rows:
        tallies = ";".join(
            f"{t.group}:" + ",".join(f"{term}={count}" for term, count in sorted(t.counts.items()))
            for t in row.tallies
        )
        focal = ";".join(
            f"{fmt(f.lo)}..{fmt(f.hi)}={fmt(f.mass)}" for f in row.focal
        )
        conflicts = ";".join(
            f"{c.left_source}>{c.right_source}={fmt(c.conflict)}" for c in row.conflicts
        )
        rows.append([
            row.component_id, row.indicator_id, ";".join(row.groups), row.responses,
            tallies, focal, fmt(row.chosen_lo), fmt(row.chosen_hi), row.label,
            fmt(row.label_score), fmt(row.bel), fmt(row.pl),
            fmt(row.expected_lo), fmt(row.expected_hi), conflicts, row.irrelevant_count,
        ])
    return _csv(ASSESSMENT_HEADER, rows)


# ----------------
# combine
# ----------------
def render_combination(summary: CombinationSummary, output_format: str) -> str:
    if output_format == "json":
        return _json(summary)

    rows = [["focal", fmt(f.lo), fmt(f.hi), fmt(f.mass), fmt(f.bel), fmt(f.pl), "", ""] for f in summary.focal]
    rows += [["conflict", "", "", "", "", "", f"{c.left_source}>{c.right_source}", fmt(c.conflict)] for c in summary.conflicts]
    rows.append(["expected", fmt(summary.expected_lo), fmt(summary.expected_hi), "", "", "", "", ""])
    return _csv(["record", "lo", "hi", "mass", "bel", "pl", "pair", "k"], rows)


# ----------------
# novelty
# ----------------
def render_novelty(report: NoveltyReport, output_format: str) -> str:
    if output_format == "json":
        return _json(report)

    rows = [
        [
            r.label,
            "" if r.year is None else r.year,
            "gap" if r.gap else "",
            _opt(r.raw),
            _opt(r.clamped),
            r.marker_count,
            ";".join(str(c) for c in r.per_query_counts),
        ]
        for r in report.rows
    ]
    text = _csv(["label", "year", "gap", "raw", "clamped", "marker_count", "query_counts"], rows)
    if report.group_mean is not None:
        text += _csv(["group_mean"], [[fmt(report.group_mean)]])
    if report.trends:
        text += render_trends(report.trends, "csv")
    return text


# ----------------
# trend
# ----------------
def render_trends(models: List[TrendRow], output_format: str) -> str:
    if output_format == "json":
        return _json([m.model_dump(mode="json") for m in models])

    rows = [
        [
            m.label,
            m.kind,
            "" if m.degree is None else m.degree,
            ";".join(fmt(c) for c in m.coefficients),
            fmt(m.sse),
            fmt(m.r2),
        ]
        for m in models
    ]
    return _csv(["label", "kind", "degree", "coefficients", "sse", "r2"], rows)


# ----------------
# index
# ----------------
def render_index(report: IndexReport, output_format: str) -> str:
    if output_format == "json":
        return _json(report)

    rows = [
        ["index", fmt(report.index)],
        ["scalarization", report.scalarization],
        ["index_lo", _opt(report.index_lo)],
        ["index_hi", _opt(report.index_hi)],
    ]
    rows += [[f"index[{component}]", fmt(value)] for component, value in sorted(report.component_indices.items())]
    rows += [
        ["demand", _opt(report.demand)],
        ["lf_d", "" if report.lf_d is None else report.lf_d],
        ["lf", "" if report.lf is None else report.lf],
        ["pr", "" if report.pr is None else report.pr],
    ]
    return _csv(["quantity", "value"], rows)


# ----------------
# scale-validate
# ----------------
def render_scale(scale: Scale, output_format: str) -> str:
    if output_format == "json":
        return _json({
            "name": scale.name,
            "entries": [{"term": str(t), "lo": i.lo, "hi": i.hi} for t, i in scale.entries],
        })
    return _csv(["term", "lo", "hi"], [[str(t), fmt(i.lo), fmt(i.hi)] for t, i in scale.entries])
