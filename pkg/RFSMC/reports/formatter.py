"""Text rendering of verdicts, critical-transition reports and sweeps."""

from typing import Iterable, List, Optional, Sequence

from rich.console import Console
from rich.table import Table

from RFSMC.bench.generators import BenchmarkSpec
from RFSMC.bench.sweep import StrategySummary
from RFSMC.ctsearch.critical import CtReport
from RFSMC.model.program import Program
from RFSMC.reports.documents import CtDocument, StatsDocument, VerdictDocument, describe_action

CT_MARK = ">>"
PAST_MARK = "*"


def stats_lines(stats: StatsDocument) -> List[str]:
    """key=value record; states_before_first_bug is 'none' without a bug."""
    lines = []
    for key, value in stats.model_dump().items():
        lines.append(f"{key}={'none' if value is None else value}")
    return lines


def verdict_lines(document: VerdictDocument) -> List[str]:
    lines = [f"strategy={document.strategy}", f"seed={document.seed}"]
    lines.extend(stats_lines(document.stats))
    if document.counterexample is not None:
        lines.append(f"counterexample ({document.counterexample_outcome}, {len(document.counterexample)} steps):")
        for step in document.counterexample:
            lines.append(f"  {step.index:>3} {step.actor} {step.action}")
    return lines


def ct_lines(program: Program, report: CtReport) -> List[str]:
    """Faulty execution with the critical transition and its causal past marked."""
    document = CtDocument.from_report(program, report)
    if report.ct_index == 0:
        header = "critical transition: start (no correct execution exists)"
    else:
        header = f"critical transition: {report.ct_index} {document.ct_actor} {document.ct_action}"
    lines = [header]
    if report.inconclusive:
        lines.append("warning: budget exhausted, index is a lower bound")
    if report.multi_cause:
        lines.append("warning: causal past does not cover every blocked actor")
    for t in report.faulty:
        if t.index == report.ct_index:
            mark = CT_MARK
        elif t.index in report.causal_past:
            mark = PAST_MARK
        else:
            mark = ""
        lines.append(f"{mark:>2} {t.index:>3} {program.actor_names[t.actor]} {describe_action(program, t.action)}")
    lines.append(
        f"ct_sub_explorations={report.sub_explorations} ct_reused_witnesses={report.reused_witnesses} "
        f"ct_traces_explored={report.stats.traces_explored} ct_states_visited={report.stats.states_visited}"
    )
    return lines


def print_lines(console: Console, lines: Iterable[str]) -> None:
    for line in lines:
        console.print(line, markup=False, highlight=False, soft_wrap=True)


def sweep_table(summaries: Sequence[StrategySummary], title: Optional[str] = None) -> Table:
    table = Table(title=title)
    for column in ("strategy", "runs", "exhausted", "q1", "median", "q3", "min", "max"):
        table.add_column(column, justify="left" if column == "strategy" else "right")
    for summary in summaries:
        row = summary.to_dict()
        table.add_row(*(str(row[column]) for column in ("strategy", "runs", "exhausted", "q1", "median", "q3", "min", "max")))
    return table


def bench_table(specs: Iterable[BenchmarkSpec]) -> Table:
    table = Table(title="benchmarks")
    table.add_column("name")
    table.add_column("scale")
    table.add_column("default", justify="right")
    for spec in specs:
        table.add_row(spec.name, spec.scale_help, str(spec.default_scale))
    return table
