"""Happens-before, trace keys, weak initials and notdep.

Positions in the public API are 1-based like the transitions of an
``Execution``; internal bit masks use 0-based bits.
"""

from dataclasses import dataclass
from typing import FrozenSet, Iterator, List, Sequence, Tuple

from RFSMC.model.simulator import Execution, Simulator, Transition


@dataclass(frozen=True, slots=True)
class ClockVector:
    """Per-actor event counts."""
    counts: Tuple[int, ...]

    @classmethod
    def zero(cls, num_actors: int) -> "ClockVector":
        return cls((0,) * num_actors)

    def join(self, other: "ClockVector") -> "ClockVector":
        return ClockVector(tuple(max(a, b) for a, b in zip(self.counts, other.counts)))

    def bump(self, actor: int) -> "ClockVector":
        counts = list(self.counts)
        counts[actor] += 1
        return ClockVector(tuple(counts))

    def __le__(self, other: "ClockVector") -> bool:
        return all(a <= b for a, b in zip(self.counts, other.counts))


class HbRelation:
    """Happens-before over the positions of one execution."""

    def __init__(self, execution: Execution, clocks: List[ClockVector], preds: List[int]):
        self.execution = execution
        self.clocks = clocks
        # preds[k] has bit i set iff i -> k (0-based)
        self.preds = preds

    def __len__(self) -> int:
        return len(self.preds)

    def __contains__(self, pair: Tuple[int, int]) -> bool:
        i, j = pair
        return 1 <= i < j <= len(self.preds) and bool((self.preds[j - 1] >> (i - 1)) & 1)

    def ordered(self, i: int, j: int) -> bool:
        """Vector-clock test: E_i happens before E_j."""
        return i < j and self.clocks[i - 1] <= self.clocks[j - 1]

    def pairs(self) -> Iterator[Tuple[int, int]]:
        for j in range(len(self.preds)):
            mask = self.preds[j]
            for i in range(j):
                if (mask >> i) & 1:
                    yield (i + 1, j + 1)

    def before(self, j: int) -> FrozenSet[int]:
        """Positions that happen before position j."""
        mask = self.preds[j - 1]
        return frozenset(i + 1 for i in range(j - 1) if (mask >> i) & 1)

    def after(self, i: int) -> FrozenSet[int]:
        bit = 1 << (i - 1)
        return frozenset(k + 1 for k in range(i, len(self.preds)) if self.preds[k] & bit)


def happens_before(execution: Execution) -> HbRelation:
    """Smallest transitive relation containing program order and dependent pairs."""
    table = execution.program.dependency_table
    gids = [table.gid(t.actor, pc) for t, pc in zip(execution.transitions, execution.pcs)]
    num_actors = execution.program.num_actors
    clocks: List[ClockVector] = []
    preds: List[int] = []
    for j, gj in enumerate(gids):
        clock = ClockVector.zero(num_actors)
        mask = 0
        dep_mask = table.mask(gj)
        for i in range(j):
            if (dep_mask >> gids[i]) & 1:
                clock = clock.join(clocks[i])
                mask |= preds[i] | (1 << i)
        clocks.append(clock.bump(execution.transitions[j].actor))
        preds.append(mask)
    return HbRelation(execution, clocks, preds)


def trace_key(execution: Execution) -> Tuple[int, ...]:
    """Canonical representative of the Mazurkiewicz class of execution.

    The lexicographically least linearization (by actor id) of the
    happens-before order; equal keys iff equivalent executions.
    """
    hb = happens_before(execution)
    actors = execution.actors
    pending = list(range(len(actors)))
    emitted = 0
    key = []
    while pending:
        best = None
        for idx in pending:
            if hb.preds[idx] & ~emitted == 0 and (best is None or actors[idx] < actors[best]):
                best = idx
        pending.remove(best)
        emitted |= 1 << best
        key.append(actors[best])
    return tuple(key)


def notdep(i: int, execution: Execution) -> Tuple[Transition, ...]:
    """Transitions after position i that do not happen after E_i, in order."""
    hb = happens_before(execution)
    bit = 1 << (i - 1)
    return tuple(execution.transitions[k] for k in range(i, len(execution)) if not hb.preds[k] & bit)


def wi_contains(table, pcs: Sequence[int], w: Sequence[int], p: int) -> bool:
    """Whether actor p is a weak initial of actor sequence w anchored at pcs.

    p in w: its first event has no dependent earlier event in w.
    p not in w: p's next statement is independent with every event of w.
    """
    counts = {}
    gids = []
    for a in w:
        offset = counts.get(a, 0)
        gids.append(table.gid(a, pcs[a] + offset))
        counts[a] = offset + 1
    if p in counts:
        k = list(w).index(p)
        mask = table.mask(gids[k])
        return not any((mask >> g) & 1 for g in gids[:k])
    if pcs[p] >= len(table.program.actors[p]):
        return False
    mask = table.mask(table.gid(p, pcs[p]))
    return not any((mask >> g) & 1 for g in gids)


def weak_initials(prefix: Execution, w: Sequence) -> FrozenSet[int]:
    """Actors enabled after prefix that are weak initials of w.

    w may hold actor ids or Transitions.
    """
    program = prefix.program
    actors = [t.actor if isinstance(t, Transition) else t for t in w]
    simulator = Simulator(program)
    state = simulator.replay(prefix.actors)
    table = program.dependency_table
    return frozenset(
        p for p in simulator.enabled(state) if wi_contains(table, state.pc, actors, p)
    )
