"""Critical-transition search.

Given a faulty maximal execution E, the critical transition is the E_i such
that E[:i-1] still has a correct maximal continuation and E[:i] does not.
The search sweeps prefixes from the end of E towards the start. Each prefix
E[:i-1] is checked first against correct executions already explored, then
by a sub-exploration that starts at E[:i-1] with E_i's actor asleep, since
continuations through E_i were shown faulty at the previous step.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from RFSMC.deps.happens_before import HbRelation, happens_before
from RFSMC.explorer.explorer import Explorer
from RFSMC.explorer.stats import Budget, ExplorationStats, Verdict
from RFSMC.explorer.strategy import Strategy
from RFSMC.model.program import Program
from RFSMC.model.simulator import Execution, RunOutcome, Simulator, Transition
from RFSMC.shared.errors import ContractViolation
from RFSMC.shared.logger import CheckerLogger


@dataclass
class CtReport:
    ct_index: int
    faulty: Execution
    faulty_outcome: RunOutcome
    correct_witness: Optional[Execution] = None
    causal_past: FrozenSet[int] = frozenset()
    inconclusive: bool = False
    multi_cause: bool = False
    s1_size: int = 0
    s1_claim_holds: Optional[bool] = None
    sub_explorations: int = 0
    reused_witnesses: int = 0
    reexplored_traces: int = 0
    stats: ExplorationStats = field(default_factory=ExplorationStats)

    @property
    def ct(self) -> Optional[Transition]:
        return self.faulty.at(self.ct_index) if self.ct_index else None


def causal_past(execution: Execution, index: int) -> FrozenSet[int]:
    """Positions that happen before E_index (empty for index 0)."""
    if index == 0:
        return frozenset()
    return happens_before(execution).before(index)


def is_prefix_equivalent(prefix: Execution, other: Execution, hb: Optional[HbRelation] = None) -> bool:
    """Whether other is equivalent to prefix extended by some sequence.

    The events of prefix must form a happens-before-closed subset of other's
    events, ordered the same way on every dependent pair.
    """
    program = other.program
    counts = [0] * program.num_actors
    for actor in prefix.actors:
        counts[actor] += 1
    positions: Dict[Tuple[int, int], int] = {}
    for position, (actor, pc) in enumerate(zip(other.actors, other.pcs)):
        positions[(actor, pc)] = position
    if any(counts[a] > sum(1 for x in other.actors if x == a) for a in range(program.num_actors)):
        return False

    hb = hb if hb is not None else happens_before(other)
    members = 0
    for actor, pc in zip(prefix.actors, prefix.pcs):
        members |= 1 << positions[(actor, pc)]
    for actor, pc in zip(prefix.actors, prefix.pcs):
        if hb.preds[positions[(actor, pc)]] & ~members:
            return False

    # dependent prefix events must keep their relative order
    table = program.dependency_table
    order = [positions[(a, pc)] for a, pc in zip(prefix.actors, prefix.pcs)]
    gids = [table.gid(a, pc) for a, pc in zip(prefix.actors, prefix.pcs)]
    for x in range(len(order)):
        mask = table.mask(gids[x])
        for y in range(x + 1, len(order)):
            if (mask >> gids[y]) & 1 and order[x] > order[y]:
                return False
    return True


class CriticalTransitionSearch:
    """Backward sweep over the prefixes of one faulty execution."""

    def __init__(
        self,
        program: Program,
        strategy: Optional[Strategy] = None,
        budget: Optional[Budget] = None,
        logger: Optional[CheckerLogger] = None,
        run_id: Optional[str] = None,
    ):
        self.program = program
        self.strategy = strategy or Strategy()
        self.budget = budget or Budget()
        self.logger = logger or CheckerLogger("ctsearch", run_id)
        self.simulator = Simulator(program)
        self._known: List[Tuple[Execution, HbRelation]] = []
        self._known_raw: List[Tuple[int, ...]] = []

    def search(self, faulty: Execution, explorer_state: Optional[Verdict] = None) -> CtReport:
        outcome = self.simulator.classify(faulty)
        if not outcome.faulty:
            raise ContractViolation("critical-transition search needs a faulty execution")

        actors = faulty.actors
        sleeps: Sequence[FrozenSet[int]] = ()
        pre_bug_keys = set()
        if explorer_state is not None:
            if explorer_state.counterexample is not None and explorer_state.counterexample.actors == actors:
                sleeps = explorer_state.counterexample_sleeps
            pre_bug_keys = explorer_state.explored_keys()
            self._known_raw = [t.actors for t in explorer_state.traces if t.outcome is RunOutcome.SAFE]

        s1_size = 0
        for sleep in sleeps[1:]:
            if not sleep:
                break
            s1_size += 1

        report = CtReport(ct_index=0, faulty=faulty, faulty_outcome=outcome, s1_size=s1_size)
        self.logger.log("ct_search_started", {"trace": str(faulty), "length": len(faulty), "s1_size": s1_size})

        for i in range(len(actors), 0, -1):
            prefix = faulty.prefix(i - 1)
            witness = self._known_witness(prefix)
            if witness is not None:
                report.reused_witnesses += 1
            else:
                sub = Explorer(
                    self.program,
                    strategy=self.strategy,
                    budget=self.budget,
                    stop_on=(RunOutcome.SAFE,),
                    crash_adaptation=True,
                    strict=False,
                    record_transcript=False,
                    logger=self.logger,
                )
                verdict = sub.explore_from(prefix.actors, {actors[i - 1]})
                report.sub_explorations += 1
                report.stats.merge(verdict.stats)
                report.reexplored_traces += sum(1 for t in verdict.traces if t.key in pre_bug_keys)
                if verdict.stopped_on is not None:
                    witness = verdict.stopped_on
                elif verdict.stats.budget_exhausted:
                    report.ct_index = i
                    report.inconclusive = True
                    self.logger.warning("ct_inconclusive", {"prefix_length": i - 1})
                    break

            self.logger.log("ct_prefix_checked", {"prefix_length": i - 1, "correct": witness is not None})
            if s1_size and i - 1 == s1_size:
                report.s1_claim_holds = witness is not None
                if witness is None:
                    self.logger.warning("s1_claim_failed", {"s1_size": s1_size})
            if witness is not None:
                report.ct_index = i
                report.correct_witness = witness
                break

        report.causal_past = causal_past(faulty, report.ct_index)
        report.multi_cause = self._multi_cause(faulty, report.ct_index)
        self.logger.log("ct_found", {
            "ct_index": report.ct_index,
            "inconclusive": report.inconclusive,
            "sub_explorations": report.sub_explorations,
            "traces": report.stats.traces_explored,
        })
        return report

    def _known_witness(self, prefix: Execution) -> Optional[Execution]:
        if self._known_raw and not self._known:
            for actors in self._known_raw:
                execution = Execution.from_actors(self.program, actors)
                self._known.append((execution, happens_before(execution)))
        for execution, hb in self._known:
            if is_prefix_equivalent(prefix, execution, hb):
                return execution
        return None

    def _multi_cause(self, faulty: Execution, ct_index: int) -> bool:
        """A blocked actor with no event at or after the CT in happens-before."""
        if ct_index == 0:
            return False
        state = self.simulator.replay(faulty.actors)
        if state.crashed:
            return False
        hb = happens_before(faulty)
        related = {faulty.at(ct_index).actor} | {faulty.at(k).actor for k in hb.after(ct_index)}
        blocked = [a for a in range(self.program.num_actors) if not self.simulator.finished(state, a)]
        return any(actor not in related for actor in blocked)


def find_critical_transition(
    program: Program,
    faulty: Execution,
    explorer_state: Optional[Verdict] = None,
    strategy: Optional[Strategy] = None,
    budget: Optional[Budget] = None,
    run_id: Optional[str] = None,
) -> CtReport:
    """Locate the critical transition of faulty (ct_index 0 when none exists)."""
    return CriticalTransitionSearch(program, strategy=strategy, budget=budget, run_id=run_id).search(
        faulty, explorer_state
    )
