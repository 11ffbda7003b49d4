"""Brute-force oracle over the unreduced transition system.

Nothing here uses wakeup trees, sleep sets or races, so the results can be
used to check the explorer and the critical-transition search. Only the
static dependency table and trace_key are shared with the explorer.
"""

from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Sequence, Tuple

from RFSMC.deps.happens_before import trace_key
from RFSMC.model.program import Program
from RFSMC.model.simulator import Execution, RunOutcome, SimState, Simulator
from RFSMC.shared.errors import ContractViolation, OracleBudgetExceeded

DEFAULT_MAX_EXECUTIONS = 1_000_000
DEFAULT_MAX_PREFIX_CLASSES = 2_000_000


def iter_executions(program: Program) -> Iterator[Tuple[Tuple[int, ...], RunOutcome]]:
    """Every maximal execution with its outcome, in lexicographic actor order."""
    simulator = Simulator(program)
    stack: List[Tuple[SimState, Tuple[int, ...]]] = [(simulator.initial_state(), ())]
    while stack:
        state, path = stack.pop()
        enabled = simulator.enabled(state)
        if not enabled:
            yield path, simulator.classify_state(state)
            continue
        for actor in sorted(enabled, reverse=True):
            stack.append((simulator.step(state, actor), path + (actor,)))


def enumerate_all(program: Program, max_executions: int = DEFAULT_MAX_EXECUTIONS) -> List[Execution]:
    """All maximal executions; fails explicitly beyond max_executions."""
    executions = []
    for path, _ in iter_executions(program):
        if len(executions) >= max_executions:
            raise OracleBudgetExceeded(
                f"more than {max_executions} maximal executions", budget=max_executions
            )
        executions.append(Execution.from_actors(program, path))
    return executions


def class_search(
    program: Program, max_prefix_classes: int = DEFAULT_MAX_PREFIX_CLASSES
) -> Tuple[Dict[Tuple[int, ...], RunOutcome], int]:
    """Lexicographic normal form and outcome of every class of maximal executions,
    plus the number of non-empty prefix classes visited.

    Depth-first over the unreduced system, extending only words that stay in
    lexicographic normal form: appending actor a is refused when some event in
    the longest suffix independent of a belongs to an actor larger than a.
    Each class, and each class of prefixes, is then visited exactly once.
    """
    simulator = Simulator(program)
    table = program.dependency_table
    classes: Dict[Tuple[int, ...], RunOutcome] = {}
    visited = 0
    stack: List[Tuple[SimState, Tuple[int, ...], Tuple[int, ...]]] = [(simulator.initial_state(), (), ())]
    while stack:
        state, path, gids = stack.pop()
        enabled = simulator.enabled(state)
        if not enabled:
            classes[path] = simulator.classify_state(state)
            continue
        for actor in sorted(enabled, reverse=True):
            g = table.gid(actor, state.pc[actor])
            mask = table.mask(g)
            normal = True
            for position in range(len(path) - 1, -1, -1):
                if (mask >> gids[position]) & 1:
                    break
                if path[position] > actor:
                    normal = False
                    break
            if not normal:
                continue
            visited += 1
            if visited > max_prefix_classes:
                raise OracleBudgetExceeded(
                    f"more than {max_prefix_classes} prefix classes", budget=max_prefix_classes
                )
            stack.append((simulator.step(state, actor), path + (actor,), gids + (g,)))
    return classes, visited


def class_keys(program: Program, max_prefix_classes: int = DEFAULT_MAX_PREFIX_CLASSES) -> Dict[Tuple[int, ...], RunOutcome]:
    return class_search(program, max_prefix_classes)[0]


def count_classes(program: Program, max_prefix_classes: int = DEFAULT_MAX_PREFIX_CLASSES) -> int:
    """Number of distinct trace keys over all maximal executions."""
    return len(class_keys(program, max_prefix_classes))


def check_verdict_consistency(program: Program, max_executions: int = DEFAULT_MAX_EXECUTIONS) -> bool:
    """Whether every equivalence class has a single outcome."""
    outcomes: Dict[Tuple[int, ...], RunOutcome] = {}
    for count, (path, outcome) in enumerate(iter_executions(program), start=1):
        if count > max_executions:
            raise OracleBudgetExceeded(f"more than {max_executions} maximal executions", budget=max_executions)
        key = trace_key(Execution.from_actors(program, path))
        if outcomes.setdefault(key, outcome) is not outcome:
            return False
    return True


def closure_happens_before(execution: Execution) -> FrozenSet[Tuple[Tuple[int, int], Tuple[int, int]]]:
    """Happens-before as pairs of events (actor, occurrence), by Floyd-Warshall.

    Events are named by actor and per-actor occurrence so relations of
    different executions can be compared directly.
    """
    program = execution.program
    events = list(zip(execution.actors, execution.pcs))
    n = len(events)
    reach = [[False] * n for _ in range(n)]
    for j in range(n):
        for i in range(j):
            a, pa = events[i]
            b, pb = events[j]
            if program.dependency_table.events_dependent(a, pa, b, pb):
                reach[i][j] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return frozenset((events[i], events[j]) for i in range(n) for j in range(n) if reach[i][j])


def hb_equivalent(first: Execution, second: Execution) -> bool:
    """Same events and the same happens-before closure."""
    if sorted(zip(first.actors, first.pcs)) != sorted(zip(second.actors, second.pcs)):
        return False
    return closure_happens_before(first) == closure_happens_before(second)


def partition_by_hb(executions: Sequence[Execution]) -> List[List[Execution]]:
    """Group executions by pairwise happens-before equivalence."""
    groups: List[Tuple[tuple, List[Execution]]] = []
    for execution in executions:
        closure = closure_happens_before(execution)
        events = sorted(zip(execution.actors, execution.pcs))
        for group_events, members in groups:
            if group_events == (tuple(events), closure):
                members.append(execution)
                break
        else:
            groups.append(((tuple(events), closure), [execution]))
    return [members for _, members in groups]


def oracle_ct(program: Program, faulty: Execution) -> int:
    """Smallest k such that no correct maximal continuation of E[:k] exists.

    Returns 0 when the initial state itself has no correct continuation.
    """
    simulator = Simulator(program)
    if not simulator.classify(faulty).faulty:
        raise ContractViolation("oracle_ct needs a faulty execution")

    @lru_cache(maxsize=None)
    def has_correct(state: SimState) -> bool:
        enabled = simulator.enabled(state)
        if not enabled:
            return simulator.classify_state(state) is RunOutcome.SAFE
        return any(has_correct(simulator.step(state, actor)) for actor in sorted(enabled))

    for k, state in enumerate(simulator.states_along(faulty.actors)):
        if not has_correct(state):
            return k
    raise ContractViolation("faulty execution ends in a correct state")
