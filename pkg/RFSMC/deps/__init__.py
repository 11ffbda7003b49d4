from RFSMC.deps.dependency import DependencyTable, dependent
from RFSMC.deps.happens_before import (
    ClockVector,
    HbRelation,
    happens_before,
    notdep,
    trace_key,
    weak_initials,
    wi_contains,
)
from RFSMC.deps.races import Race, reversible_races

__all__ = [
    "ClockVector",
    "DependencyTable",
    "HbRelation",
    "Race",
    "dependent",
    "happens_before",
    "notdep",
    "reversible_races",
    "trace_key",
    "weak_initials",
    "wi_contains",
]
