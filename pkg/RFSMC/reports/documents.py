"""Machine-readable report documents.

Field names of StatsDocument are a stable interface; wall-clock time is kept
out of it so two runs with the same seed produce identical documents.
"""

from typing import List, Optional

from pydantic import BaseModel, Field

from RFSMC.ctsearch.critical import CtReport
from RFSMC.explorer.stats import ExplorationStats, Outcome, Verdict
from RFSMC.model.program import Program
from RFSMC.model.simulator import Execution


class StatsDocument(BaseModel):
    traces_explored: int
    states_visited: int
    states_before_first_bug: Optional[int] = None
    ssb_count: int = 0
    verdict: str
    peak_tree_nodes: int = 0
    final_tree_nodes: int = 0

    @classmethod
    def from_stats(cls, stats: ExplorationStats, outcome: Outcome) -> "StatsDocument":
        return cls(
            traces_explored=stats.traces_explored,
            states_visited=stats.states_visited,
            states_before_first_bug=stats.states_before_first_bug,
            ssb_count=stats.ssb_count,
            verdict=outcome.value,
            peak_tree_nodes=stats.peak_tree_nodes,
            final_tree_nodes=stats.final_tree_nodes,
        )


class StepDocument(BaseModel):
    """One transition of a counterexample, replayable by actor name."""
    index: int = Field(..., description="1-based position in the execution")
    actor: str
    action: str


def steps(program: Program, execution: Execution) -> List[StepDocument]:
    return [
        StepDocument(index=t.index, actor=program.actor_names[t.actor], action=describe_action(program, t.action))
        for t in execution
    ]


def describe_action(program: Program, action) -> str:
    """Action rendered with object and actor names instead of indices."""
    text = action.kind.value
    if action.obj is not None:
        text += f" {program.decl(action.obj).name}"
    if action.source_filter is not None:
        text += f" from {program.actor_names[action.source_filter]}"
    if action.comm_refs:
        text += " " + ",".join(f"#{ref}" for ref in action.comm_refs)
    return text


class CtDocument(BaseModel):
    ct_index: int
    ct_actor: Optional[str] = None
    ct_action: Optional[str] = None
    causal_past: List[int] = Field(default_factory=list)
    inconclusive: bool = False
    multi_cause: bool = False
    correct_witness: Optional[List[str]] = None
    s1_size: int = 0
    s1_claim_holds: Optional[bool] = None
    sub_explorations: int = 0
    reused_witnesses: int = 0
    reexplored_traces: int = 0
    traces_explored: int = 0
    states_visited: int = 0

    @classmethod
    def from_report(cls, program: Program, report: CtReport) -> "CtDocument":
        ct = report.ct
        witness = report.correct_witness
        return cls(
            ct_index=report.ct_index,
            ct_actor=program.actor_names[ct.actor] if ct is not None else None,
            ct_action=describe_action(program, ct.action) if ct is not None else None,
            causal_past=sorted(report.causal_past),
            inconclusive=report.inconclusive,
            multi_cause=report.multi_cause,
            correct_witness=[program.actor_names[a] for a in witness.actors] if witness is not None else None,
            s1_size=report.s1_size,
            s1_claim_holds=report.s1_claim_holds,
            sub_explorations=report.sub_explorations,
            reused_witnesses=report.reused_witnesses,
            reexplored_traces=report.reexplored_traces,
            traces_explored=report.stats.traces_explored,
            states_visited=report.stats.states_visited,
        )


class VerdictDocument(BaseModel):
    outcome: str
    strategy: str
    seed: int
    stats: StatsDocument
    counterexample_outcome: Optional[str] = None
    counterexample: Optional[List[StepDocument]] = None
    critical_transition: Optional[CtDocument] = None

    @classmethod
    def build(
        cls,
        program: Program,
        verdict: Verdict,
        strategy: str,
        seed: int,
        ct_report: Optional[CtReport] = None,
    ) -> "VerdictDocument":
        counterexample = verdict.counterexample
        return cls(
            outcome=verdict.outcome.value,
            strategy=strategy,
            seed=seed,
            stats=StatsDocument.from_stats(verdict.stats, verdict.outcome),
            counterexample_outcome=verdict.counterexample_outcome.value if verdict.counterexample_outcome else None,
            counterexample=steps(program, counterexample) if counterexample is not None else None,
            critical_transition=CtDocument.from_report(program, ct_report) if ct_report is not None else None,
        )
