"""Static dependency relation between actions.

Two actions are independent when, executed by different actors from any
state where both are enabled, neither disables the other and both orders
reach the same state. The relation below is a sound over-approximation for
the actor semantics in ``RFSMC.model.simulator``.
"""

from typing import List

from RFSMC.model.actions import (
    COMM_WAITS,
    MUTEX_ACTIONS,
    POSTS,
    SEMAPHORE_ACTIONS,
    Action,
    ActionKind,
)


def dependent(a: Action, b: Action) -> bool:
    """Symmetric dependency between actions of two different actors."""
    if a.kind is ActionKind.FAIL or b.kind is ActionKind.FAIL:
        # Fail disables every other actor, LocalStep included.
        return True
    if a.kind is ActionKind.LOCAL_STEP or b.kind is ActionKind.LOCAL_STEP:
        return False
    if not set(a.objects) & set(b.objects):
        return False

    ka, kb = a.kind, b.kind
    if ka in POSTS and kb in POSTS:
        # A send never competes with a receive for a queue slot; same-kind posts do.
        return ka is kb
    if ka in COMM_WAITS and kb in COMM_WAITS:
        return False
    if ka in COMM_WAITS or kb in COMM_WAITS:
        return True
    if ka in MUTEX_ACTIONS:
        return True
    if ka in SEMAPHORE_ACTIONS:
        return not (ka is ActionKind.SEM_RELEASE and kb is ActionKind.SEM_RELEASE)
    # Barrier: arrivals commute, an arrival can enable a waiter.
    return {ka, kb} == {ActionKind.BARRIER_ARRIVE, ActionKind.BARRIER_WAIT}


class DependencyTable:
    """Dependency between every pair of statements of a program.

    Statements get a global id (gid): actor offset plus statement index.
    Statements of the same actor are always reported dependent.
    """

    def __init__(self, program):
        self.program = program
        self.offsets: List[int] = []
        actions: List[Action] = []
        owners: List[int] = []
        for actor, stmts in enumerate(program.actors):
            self.offsets.append(len(actions))
            actions.extend(stmts)
            owners.extend([actor] * len(stmts))
        self.actions = actions
        self._masks = [0] * len(actions)
        for g in range(len(actions)):
            for h in range(g + 1, len(actions)):
                if owners[g] == owners[h] or dependent(actions[g], actions[h]):
                    self._masks[g] |= 1 << h
                    self._masks[h] |= 1 << g

    def gid(self, actor: int, pc: int) -> int:
        return self.offsets[actor] + pc

    def dep(self, g: int, h: int) -> bool:
        return bool((self._masks[g] >> h) & 1)

    def mask(self, g: int) -> int:
        return self._masks[g]

    def events_dependent(self, actor_a: int, pc_a: int, actor_b: int, pc_b: int) -> bool:
        if actor_a == actor_b:
            return True
        return self.dep(self.gid(actor_a, pc_a), self.gid(actor_b, pc_b))
