"""RFS ODPOR: optimal stateless exploration under a pluggable search strategy.

The explorer keeps the exploration tree T and the set of pending nodes
(ExpHeads). Each iteration picks a pending node according to the strategy,
takes an admissible child from its wakeup tree and steps into it. Maximal
executions are classified, their reversible races are inserted back into T
as new wakeup sequences, and the leftmost completed part of T is collected.
"""

import time
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

from RFSMC.ctsearch.crash import crash_adaptation
from RFSMC.deps.happens_before import happens_before, trace_key, wi_contains
from RFSMC.deps.races import reversible_races
from RFSMC.explorer.stats import Budget, ExplorationStats, ExploredTrace, Outcome, Verdict
from RFSMC.explorer.strategy import Strategy, StrategyRunner
from RFSMC.model.program import Program
from RFSMC.model.simulator import Execution, RunOutcome, SimState, Simulator
from RFSMC.shared.errors import OptimalityViolation
from RFSMC.shared.logger import CheckerLogger
from RFSMC.wakeup.tree import (
    ExpHeads,
    ExplorationNode,
    admissible_children,
    child_sleep,
    done_before,
    garbage_collect,
    tree_insert,
    wut_extract,
)


FAULTY = frozenset({RunOutcome.DEADLOCK, RunOutcome.CRASH})


class Explorer:
    """One exploration run over a program.

    Args:
        program: validated program to explore.
        strategy: search strategy and seed (default: dfs, seed 0).
        budget: optional limits; hitting one ends the run as Exhausted.
        stop_on: run outcomes that end the exploration when first observed.
        gc_enabled: collect the leftmost completed part of T.
        crash_adaptation: schedule the remaining actors after a crash.
        strict: raise OptimalityViolation when a fresh node has every
            enabled actor asleep; otherwise count it and drop the node.
        record_traces: keep (actors, outcome, trace key) of every maximal run.
        record_transcript: keep the deterministic event transcript.
    """

    def __init__(
        self,
        program: Program,
        strategy: Optional[Strategy] = None,
        budget: Optional[Budget] = None,
        stop_on: Iterable[RunOutcome] = (),
        gc_enabled: bool = True,
        crash_adaptation: bool = False,
        strict: bool = True,
        record_traces: bool = True,
        record_transcript: bool = True,
        logger: Optional[CheckerLogger] = None,
        run_id: Optional[str] = None,
    ):
        self.program = program
        self.simulator = Simulator(program)
        self.table = program.dependency_table
        self.strategy = strategy or Strategy()
        self.budget = budget or Budget()
        self.stop_on = frozenset(stop_on)
        self.gc_enabled = gc_enabled
        self.crash_adaptation = crash_adaptation
        self.strict = strict
        self.record_traces = record_traces
        self.record_transcript = record_transcript
        self.logger = logger or CheckerLogger("explorer", run_id)
        self._reset()

    def _reset(self) -> None:
        self.runner = StrategyRunner(self.strategy)
        self.stats = ExplorationStats()
        self.heads = ExpHeads()
        self.root: Optional[ExplorationNode] = None
        self.transcript: List[str] = []
        self.traces: List[ExploredTrace] = []
        self._head_states: Dict[ExplorationNode, SimState] = {}
        self._tree_nodes = 0
        self._base = 0
        self._stopped_on: Optional[Execution] = None
        self._first_bug: Optional[Execution] = None
        self._first_bug_outcome: Optional[RunOutcome] = None
        self._first_bug_sleeps: tuple = ()

    def run(self) -> Verdict:
        return self.explore_from(())

    def explore_from(self, prefix: Sequence[int], initial_sleep: Iterable[int] = ()) -> Verdict:
        """Explore every class of maximal continuations of prefix.

        Continuations that have an actor of initial_sleep as a weak initial
        are considered covered already. Races reaching into prefix are ignored.
        """
        self._reset()
        start = time.monotonic()
        prefix = tuple(prefix)
        root_state = self.simulator.replay(prefix)
        self._base = len(prefix)
        self.root = ExplorationNode(path=prefix, pcs=root_state.pc, sleep=set(initial_sleep))
        self._on_create(self.root)
        self.logger.log("exploration_started", {
            "strategy": self.strategy.name,
            "seed": self.strategy.seed,
            "prefix": list(prefix),
            "actors": self.program.num_actors,
            "statements": self.program.statement_count,
        })

        enabled = self.simulator.enabled(root_state)
        if not enabled:
            self._on_maximal(self.root, root_state)
        elif self._seed(self.root, enabled):
            self._push(self.root, root_state)

        while self.heads and self._stopped_on is None:
            if self._over_budget(start):
                self.stats.budget_exhausted = True
                self.logger.log("budget_exhausted", self.stats.to_dict())
                break
            node = self.runner.pick_head(self.heads)
            self._note(f"head {self._fmt(node.path)}")
            actor = self.runner.pick_child(admissible_children(node, self.table))
            self._expand(node, actor)

        self.stats.wall_time_s = time.monotonic() - start
        self.stats.final_tree_nodes = self._tree_nodes
        verdict = self._verdict()
        self.logger.log("exploration_finished", {"outcome": verdict.outcome.value, **self.stats.to_dict()})
        return verdict

    def _over_budget(self, start: float) -> bool:
        budget = self.budget
        if budget.max_traces is not None and self.stats.traces_explored >= budget.max_traces:
            return True
        if budget.max_states is not None and self.stats.states_visited >= budget.max_states:
            return True
        return budget.timeout_s is not None and time.monotonic() - start >= budget.timeout_s

    def _expand(self, node: ExplorationNode, actor: int) -> None:
        state = self._state_of(node)
        if actor in node.sleep:
            # covered already; never expected with a well-formed wakeup tree
            wut_extract(node, actor)
            self.stats.ssb_count += 1
            self._note(f"asleep {self._fmt(node.path)} <- {self._name(actor)}")
            if node.wut.is_empty():
                self._drop(node)
            return

        node.done.append(actor)
        child = ExplorationNode(path=node.path + (actor,), pcs=node.child_pcs(actor), parent=node)
        child.sleep = child_sleep(node, actor, self.table)
        child.wut = wut_extract(node, actor)
        node.children[actor] = child
        if node.wut.is_empty():
            self._drop(node)

        child_state = self.simulator.step(state, actor)
        self._on_create(child)
        self._note(f"expand {self._fmt(node.path)} <- {self._name(actor)}")

        enabled = self.simulator.enabled(child_state)
        if not enabled:
            self.runner.note_expanded(None)
            self._on_maximal(child, child_state)
            return
        if child.wut.is_empty() and not self._seed(child, enabled):
            self.runner.note_expanded(None)
            if self.gc_enabled:
                self._collect(child)
            return
        self._push(child, child_state)
        self.runner.note_expanded(child)

    def _seed(self, node: ExplorationNode, enabled: FrozenSet[int]) -> bool:
        candidates = enabled - node.sleep
        if not candidates:
            self.stats.ssb_count += 1
            if self.strict:
                raise OptimalityViolation(
                    f"every enabled actor is asleep at {self._fmt(node.path)}",
                    run_id=self.logger.run_id,
                    metadata={"path": list(node.path), "sleep": sorted(node.sleep)},
                )
            self._note(f"blocked {self._fmt(node.path)}")
            return False
        actor = self.runner.pick_seed(candidates)
        node.wut.seed(actor)
        self._note(f"seed {self._fmt(node.path)} <- {self._name(actor)}")
        return True

    def _on_maximal(self, leaf: ExplorationNode, state: SimState) -> None:
        leaf.maximal = True
        outcome = self.simulator.classify_state(state)
        execution = Execution.from_actors(self.program, leaf.path)
        self.stats.traces_explored += 1
        if self.record_traces:
            self.traces.append(ExploredTrace(leaf.path, outcome, trace_key(execution)))
        self._note(f"trace {self._fmt(leaf.path)} {outcome.value}")
        self.logger.debug("trace_explored", {"trace": list(leaf.path), "outcome": outcome.value})

        if outcome.faulty and self._first_bug is None:
            self._first_bug = execution
            self._first_bug_outcome = outcome
            self._first_bug_sleeps = self._sleeps_along(leaf)
            self.stats.states_before_first_bug = self.stats.states_visited
            self.logger.log("first_bug_found", {
                "outcome": outcome.value,
                "trace": str(execution),
                "states_visited": self.stats.states_visited,
            })

        if outcome in self.stop_on:
            self._stopped_on = execution
            return

        if outcome is RunOutcome.CRASH and self.crash_adaptation and leaf.parent is not None:
            parent = leaf.parent
            added = crash_adaptation(parent, self.simulator.enabled(self._state_of(parent)))
            if added:
                self._push(parent)
                self._note(f"crash {self._fmt(parent.path)} + {self._fmt(tuple(added))}")

        self._process_races(leaf, execution)
        if self.gc_enabled:
            self._collect(leaf)

    def _process_races(self, leaf: ExplorationNode, execution: Execution) -> None:
        hb = happens_before(execution)
        states = self.simulator.states_along(execution.actors)
        races = reversible_races(execution, hb=hb, states=states, min_index=self._base + 1)
        if not races:
            return

        path_nodes: List[ExplorationNode] = []
        walker: Optional[ExplorationNode] = leaf
        while walker is not None:
            path_nodes.append(walker)
            walker = walker.parent
        path_nodes.reverse()

        actors = execution.actors
        for race in races:
            anchor = path_nodes[race.i - 1 - self._base]
            racing = actors[race.i - 1]
            bit = 1 << (race.i - 1)
            v = tuple(actors[k] for k in range(race.i, len(actors)) if not hb.preds[k] & bit)
            v += (actors[race.j - 1],)
            where = f"race {race.i}-{race.j} at {self._fmt(anchor.path)} v={self._fmt(v)}"

            blocked = anchor.sleep.union(done_before(anchor, racing))
            if any(wi_contains(self.table, anchor.pcs, v, other) for other in sorted(blocked)):
                self._note(f"{where} skipped")
                continue
            target = tree_insert(anchor, v, self.table)
            if target is None:
                self._note(f"{where} covered")
                continue
            self.stats.races_inserted += 1
            self._push(target)
            self._note(f"{where} -> {self._fmt(target.path)}")

    def _collect(self, leaf: ExplorationNode) -> None:
        garbage_collect(leaf, self._on_remove)

    def _on_create(self, node: ExplorationNode) -> None:
        self.stats.states_visited += 1
        self._tree_nodes += 1
        self.stats.peak_tree_nodes = max(self.stats.peak_tree_nodes, self._tree_nodes)

    def _on_remove(self, node: ExplorationNode) -> None:
        self._tree_nodes -= 1
        self._drop(node)
        self._note(f"gc {self._fmt(node.path)}")
        if node is self.root:
            self.root = None

    def _push(self, node: ExplorationNode, state: Optional[SimState] = None) -> None:
        self.heads.add(node)
        if state is not None:
            self._head_states[node] = state

    def _drop(self, node: ExplorationNode) -> None:
        self.heads.discard(node)
        self._head_states.pop(node, None)

    def _state_of(self, node: ExplorationNode) -> SimState:
        """State at node: cached while node is pending, replayed otherwise."""
        state = self._head_states.get(node)
        if state is None:
            state = self.simulator.replay(node.path)
            if node in self.heads:
                self._head_states[node] = state
        return state

    def _sleeps_along(self, leaf: ExplorationNode) -> tuple:
        sleeps = []
        walker: Optional[ExplorationNode] = leaf
        while walker is not None:
            sleeps.append(frozenset(walker.sleep))
            walker = walker.parent
        return tuple(reversed(sleeps))

    def _verdict(self) -> Verdict:
        if self._first_bug is not None:
            outcome = Outcome.of(self._first_bug_outcome)
        elif self.stats.budget_exhausted:
            outcome = Outcome.EXHAUSTED
        else:
            outcome = Outcome.ALL_SAFE
        return Verdict(
            outcome=outcome,
            stats=self.stats,
            counterexample=self._first_bug,
            counterexample_outcome=self._first_bug_outcome,
            counterexample_sleeps=self._first_bug_sleeps,
            stopped_on=self._stopped_on,
            transcript=self.transcript,
            traces=self.traces,
        )

    def _note(self, line: str) -> None:
        if self.record_transcript:
            self.transcript.append(line)

    def _name(self, actor: int) -> str:
        return self.program.actor_names[actor]

    def _fmt(self, actors: Sequence[int]) -> str:
        if not actors:
            return "<root>"
        return ".".join(self.program.actor_names[a] for a in actors)


def explore(
    program: Program,
    strategy: Optional[Strategy] = None,
    budget: Optional[Budget] = None,
    stop_at_first_bug: bool = False,
    gc_enabled: bool = True,
    run_id: Optional[str] = None,
) -> Verdict:
    """Explore program; stop at the first deadlock or crash when asked."""
    explorer = Explorer(
        program,
        strategy=strategy,
        budget=budget,
        stop_on=FAULTY if stop_at_first_bug else (),
        gc_enabled=gc_enabled,
        run_id=run_id,
    )
    return explorer.run()


def transcript(verdict: Verdict) -> List[str]:
    """Deterministic event lines of a run (no timings)."""
    return list(verdict.transcript)
