from RFSMC.reports.documents import CtDocument, StatsDocument, StepDocument, VerdictDocument
from RFSMC.reports.formatter import ct_lines, stats_lines, sweep_table, verdict_lines

__all__ = [
    "CtDocument",
    "StatsDocument",
    "StepDocument",
    "VerdictDocument",
    "ct_lines",
    "stats_lines",
    "sweep_table",
    "verdict_lines",
]
