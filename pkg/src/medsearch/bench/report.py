"""
Report rendering: aligned tables for people, JSON lines for machines.
"""

import json
from typing import Any, Iterable, Sequence

from .metrics import MetricsReport
from .runner import BenchmarkReport

FORMATS = ("table", "machine")

BENCH_COLUMNS = ("topology", "modeled_ms", "median_ms", "messages_sent", "pipeline_ms", "locations")
METRIC_COLUMNS = ("scope", "queries", "precision", "recall", "f_measure")


def render_table(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Left-aligned text, right-aligned numbers, two spaces between columns."""
    cells = [[str(h) for h in header]] + [[_cell(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for row in cells:
        parts = []
        for i, value in enumerate(row):
            numeric = _is_number(value)
            parts.append(value.rjust(widths[i]) if numeric else value.ljust(widths[i]))
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines)


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def _is_number(value: str) -> bool:
    try:
        float(value)
    except ValueError:
        return False
    return True


def machine_lines(records: Iterable[dict[str, Any]]) -> str:
    return "\n".join(json.dumps(r, sort_keys=True, ensure_ascii=False) for r in records)


def parse_machine(text: str) -> list[dict[str, Any]]:
    """Inverse of the machine format."""
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def render_benchmarks(reports: Sequence[BenchmarkReport], fmt: str = "table") -> str:
    if fmt == "machine":
        return machine_lines({"kind": "benchmark", **r.to_dict()} for r in reports)
    rows = [[r.to_dict()[c] for c in BENCH_COLUMNS] for r in reports]
    text = render_table(BENCH_COLUMNS, rows)
    if len(reports) == 2 and all(r.median_ms for r in reports):
        by_kind = {r.topology.value: r for r in reports}
        if {"static", "mobile"} <= set(by_kind):
            ratio = by_kind["mobile"].median_ms / by_kind["static"].median_ms
            text += f"\n\nmobile/static = {ratio:.3f}"
    return text


def render_metrics(report: MetricsReport, fmt: str = "table") -> str:
    data = report.to_dict()
    if fmt == "machine":
        records = [{"kind": "metrics", "scope": "overall", **data["overall"]}]
        records += [
            {"kind": "metrics", "scope": c, **counts} for c, counts in data["per_category"].items()
        ]
        if data["coverage_gaps"]:
            records.append({"kind": "coverage_gaps", "queries": data["coverage_gaps"]})
        return machine_lines(records)

    def row(scope: str, counts: dict[str, Any]) -> list[Any]:
        return [
            scope, counts["queries"], counts["precision"], counts["recall"], counts["f_measure"]
        ]

    rows = [row(c, counts) for c, counts in data["per_category"].items()]
    rows.append(row("overall", data["overall"]))
    text = render_table(METRIC_COLUMNS, rows)
    if data["coverage_gaps"]:
        text += f"\n\nno judgments for {len(data['coverage_gaps'])} queries"
    return text
