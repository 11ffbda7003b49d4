"""Exploration statistics, budgets and verdicts."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from RFSMC.model.simulator import Execution, RunOutcome


class Outcome(str, Enum):
    ALL_SAFE = "AllSafe"
    DEADLOCK = "Deadlock"
    CRASH = "Crash"
    EXHAUSTED = "Exhausted"

    @classmethod
    def of(cls, run: RunOutcome) -> "Outcome":
        return {RunOutcome.DEADLOCK: cls.DEADLOCK, RunOutcome.CRASH: cls.CRASH}.get(run, cls.ALL_SAFE)


@dataclass(frozen=True)
class Budget:
    max_traces: Optional[int] = None
    max_states: Optional[int] = None
    timeout_s: Optional[float] = None


@dataclass
class ExplorationStats:
    traces_explored: int = 0
    states_visited: int = 0
    states_before_first_bug: Optional[int] = None
    ssb_count: int = 0
    peak_tree_nodes: int = 0
    final_tree_nodes: int = 0
    races_inserted: int = 0
    budget_exhausted: bool = False
    wall_time_s: float = 0.0

    def merge(self, other: "ExplorationStats") -> None:
        """Accumulate another run's counters (used across CT sub-explorations)."""
        self.traces_explored += other.traces_explored
        self.states_visited += other.states_visited
        self.ssb_count += other.ssb_count
        self.peak_tree_nodes = max(self.peak_tree_nodes, other.peak_tree_nodes)
        self.races_inserted += other.races_inserted
        self.wall_time_s += other.wall_time_s

    def to_dict(self) -> Dict[str, Any]:
        return {
            "traces_explored": self.traces_explored,
            "states_visited": self.states_visited,
            "states_before_first_bug": self.states_before_first_bug,
            "ssb_count": self.ssb_count,
            "peak_tree_nodes": self.peak_tree_nodes,
            "final_tree_nodes": self.final_tree_nodes,
            "races_inserted": self.races_inserted,
            "budget_exhausted": self.budget_exhausted,
            "wall_time_s": round(self.wall_time_s, 4),
        }


@dataclass(frozen=True)
class ExploredTrace:
    actors: Tuple[int, ...]
    outcome: RunOutcome
    key: Tuple[int, ...]


@dataclass
class Verdict:
    outcome: Outcome
    stats: ExplorationStats
    counterexample: Optional[Execution] = None
    counterexample_outcome: Optional[RunOutcome] = None
    # sleep sets of the nodes along the counterexample, depth 0 .. n
    counterexample_sleeps: Tuple[FrozenSet[int], ...] = ()
    stopped_on: Optional[Execution] = None
    transcript: List[str] = field(default_factory=list)
    traces: List[ExploredTrace] = field(default_factory=list)

    @property
    def found_bug(self) -> bool:
        return self.counterexample is not None

    def explored_keys(self) -> set:
        return {trace.key for trace in self.traces}
