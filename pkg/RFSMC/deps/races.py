"""Reversible races of a maximal execution."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from RFSMC.deps.happens_before import HbRelation, happens_before
from RFSMC.model.simulator import Execution, SimState, Simulator


@dataclass(frozen=True, slots=True, order=True)
class Race:
    """Positions (1-based) of the two racing transitions, i < j."""
    i: int
    j: int


def reversible_races(
    execution: Execution,
    hb: Optional[HbRelation] = None,
    states: Optional[Sequence[SimState]] = None,
    min_index: int = 1,
) -> List[Race]:
    """All reversible races (i, j) of execution with i >= min_index, ordered by (i, j).

    A race: different actors, directly dependent, no k with i -> k -> j, and
    E_j's actor is enabled after replaying the events before i followed by
    the events between i and j that do not happen after E_i.
    """
    program = execution.program
    simulator = Simulator(program)
    hb = hb if hb is not None else happens_before(execution)
    if states is None:
        states = simulator.states_along(execution.actors)
    table = program.dependency_table
    actors = execution.actors
    gids = [table.gid(a, pc) for a, pc in zip(actors, execution.pcs)]
    preds = hb.preds

    races = []
    for i in range(max(min_index, 1) - 1, len(actors)):
        bit_i = 1 << i
        mask_i = table.mask(gids[i])
        after_i = 0
        for j in range(i + 1, len(actors)):
            if not preds[j] & bit_i:
                continue
            direct = actors[i] != actors[j] and (mask_i >> gids[j]) & 1
            # an intermediate k with i -> k -> j
            if direct and not preds[j] & after_i and _reversible(simulator, states[i], actors, preds, i, j):
                races.append(Race(i + 1, j + 1))
            after_i |= 1 << j
    return races


def _reversible(simulator: Simulator, state: SimState, actors: Tuple[int, ...], preds: List[int], i: int, j: int) -> bool:
    bit_i = 1 << i
    for k in range(i + 1, j):
        if not preds[k] & bit_i:
            state = simulator.step(state, actors[k])
    return simulator.is_enabled(state, actors[j])
