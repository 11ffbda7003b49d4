"""Actor-model semantics: states, stepping, replay and outcome classification.

States are immutable; ``step`` returns a fresh state. Two executions that
differ only by swapping adjacent independent transitions reach equal states,
which is what lets the explorer, the oracle and CT search compare states.
"""

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple

from RFSMC.model.actions import Action, ActionKind, CommId, ObjectKind
from RFSMC.model.program import Program
from RFSMC.shared.errors import ContractViolation, ReplayError


class RunOutcome(str, Enum):
    SAFE = "Safe"
    DEADLOCK = "Deadlock"
    CRASH = "Crash"

    @property
    def faulty(self) -> bool:
        return self is not RunOutcome.SAFE


@dataclass(frozen=True, slots=True)
class MailboxState:
    pending_sends: Tuple[CommId, ...] = ()
    pending_recvs: Tuple[CommId, ...] = ()


@dataclass(frozen=True, slots=True)
class SimState:
    pc: Tuple[int, ...]
    mailboxes: Tuple[MailboxState, ...]
    # Matched (send, recv) pairs, kept sorted so equal histories compare equal.
    pairs: Tuple[Tuple[CommId, CommId], ...]
    matched: FrozenSet[CommId]
    mutex_queues: Tuple[Tuple[int, ...], ...]
    mutex_held: Tuple[bool, ...]
    sem_tokens: Tuple[int, ...]
    sem_queues: Tuple[Tuple[int, ...], ...]
    # barrier_rounds[b][actor]: arrivals made by actor; barrier_arrivals[b][g]: arrivals in generation g
    barrier_rounds: Tuple[Tuple[int, ...], ...]
    barrier_arrivals: Tuple[Tuple[int, ...], ...]
    crashed: bool = False
    fail_witness: Optional[int] = None

    def completed_generations(self, barrier: int, capacity: int) -> int:
        done = 0
        for arrivals in self.barrier_arrivals[barrier]:
            if arrivals < capacity:
                break
            done += 1
        return done


@dataclass(frozen=True, slots=True)
class Transition:
    actor: int
    action: Action
    index: int

    def __str__(self) -> str:
        return f"{self.index}:{self.actor}:{self.action.describe()}"


@dataclass(frozen=True)
class Execution:
    """A finite transition sequence from the initial state.

    Indices are 1-based in ``at``; the usual Python indexing is 0-based.
    """
    program: Program
    transitions: Tuple[Transition, ...]

    @classmethod
    def from_actors(cls, program: Program, actors: Sequence[int]) -> "Execution":
        counts = [0] * program.num_actors
        transitions = []
        for index, actor in enumerate(actors, start=1):
            if not 0 <= actor < program.num_actors:
                raise ReplayError(f"no actor {actor}", index=index)
            pc = counts[actor]
            if pc >= len(program.actors[actor]):
                raise ReplayError(f"actor {actor} has no statement {pc}", index=index)
            transitions.append(Transition(actor, program.actors[actor][pc], index))
            counts[actor] += 1
        return cls(program, tuple(transitions))

    def __len__(self) -> int:
        return len(self.transitions)

    def __iter__(self) -> Iterator[Transition]:
        return iter(self.transitions)

    def __getitem__(self, item):
        return self.transitions[item]

    def at(self, index: int) -> Transition:
        """The index-th transition, 1-based."""
        if not 1 <= index <= len(self.transitions):
            raise IndexError(index)
        return self.transitions[index - 1]

    @cached_property
    def actors(self) -> Tuple[int, ...]:
        return tuple(t.actor for t in self.transitions)

    @cached_property
    def pcs(self) -> Tuple[int, ...]:
        """Statement index of every transition within its actor."""
        counts = [0] * self.program.num_actors
        result = []
        for t in self.transitions:
            result.append(counts[t.actor])
            counts[t.actor] += 1
        return tuple(result)

    def dom(self) -> range:
        return range(1, len(self.transitions) + 1)

    def prefix(self, length: int) -> "Execution":
        return Execution.from_actors(self.program, self.actors[:length])

    def extend(self, actor: int) -> "Execution":
        return Execution.from_actors(self.program, self.actors + (actor,))

    def __str__(self) -> str:
        return " ".join(self.program.actor_names[a] for a in self.actors)


class Simulator:
    """Steps the actor model of one program."""

    def __init__(self, program: Program):
        self.program = program
        self._mailboxes = program.count(ObjectKind.MAILBOX)
        self._mutexes = program.count(ObjectKind.MUTEX)
        self._semaphores = [0] * program.count(ObjectKind.SEMAPHORE)
        self._capacities = [0] * program.count(ObjectKind.BARRIER)
        for decl in program.objects:
            if decl.obj.kind is ObjectKind.SEMAPHORE:
                self._semaphores[decl.obj.index] = decl.tokens
            elif decl.obj.kind is ObjectKind.BARRIER:
                self._capacities[decl.obj.index] = decl.capacity

    def initial_state(self) -> SimState:
        n = self.program.num_actors
        return SimState(
            pc=(0,) * n,
            mailboxes=(MailboxState(),) * self._mailboxes,
            pairs=(),
            matched=frozenset(),
            mutex_queues=((),) * self._mutexes,
            mutex_held=(False,) * self._mutexes,
            sem_tokens=tuple(self._semaphores),
            sem_queues=((),) * len(self._semaphores),
            barrier_rounds=((0,) * n,) * len(self._capacities),
            barrier_arrivals=((),) * len(self._capacities),
        )

    def finished(self, state: SimState, actor: int) -> bool:
        return state.pc[actor] >= len(self.program.actors[actor])

    def peek(self, state: SimState, actor: int) -> Action:
        """The action actor would perform next."""
        if self.finished(state, actor):
            raise ContractViolation(f"actor {actor} has finished", metadata={"actor": actor})
        return self.program.actors[actor][state.pc[actor]]

    def is_enabled(self, state: SimState, actor: int) -> bool:
        if state.crashed or self.finished(state, actor):
            return False
        action = self.program.actors[actor][state.pc[actor]]
        kind = action.kind
        if kind is ActionKind.WAIT or kind is ActionKind.WAIT_ALL:
            return all((actor, ref) in state.matched for ref in action.comm_refs)
        if kind is ActionKind.MUTEX_WAIT:
            queue = state.mutex_queues[action.obj.index]
            return bool(queue) and queue[0] == actor
        if kind is ActionKind.SEM_WAIT:
            queue = state.sem_queues[action.obj.index]
            return actor in queue and queue.index(actor) < state.sem_tokens[action.obj.index]
        if kind is ActionKind.BARRIER_WAIT:
            b = action.obj.index
            generation = state.barrier_rounds[b][actor] - 1
            arrivals = state.barrier_arrivals[b]
            return generation < len(arrivals) and arrivals[generation] >= self._capacities[b]
        return True

    def enabled(self, state: SimState) -> FrozenSet[int]:
        if state.crashed:
            return frozenset()
        return frozenset(a for a in range(self.program.num_actors) if self.is_enabled(state, a))

    def step(self, state: SimState, actor: int) -> SimState:
        if not self.is_enabled(state, actor):
            raise ContractViolation(f"actor {actor} is not enabled", metadata={"actor": actor, "pc": state.pc})
        pc = state.pc[actor]
        action = self.program.actors[actor][pc]
        new_pc = state.pc[:actor] + (pc + 1,) + state.pc[actor + 1:]
        kind = action.kind

        if kind is ActionKind.ASYNC_SEND or kind is ActionKind.ASYNC_RECV:
            return self._post(replace(state, pc=new_pc), actor, pc, action)
        if kind is ActionKind.MUTEX_ASYNC_LOCK:
            m = action.obj.index
            return replace(state, pc=new_pc, mutex_queues=_set(state.mutex_queues, m, state.mutex_queues[m] + (actor,)))
        if kind is ActionKind.MUTEX_WAIT:
            return replace(state, pc=new_pc, mutex_held=_set(state.mutex_held, action.obj.index, True))
        if kind is ActionKind.MUTEX_UNLOCK:
            m = action.obj.index
            queue = state.mutex_queues[m]
            if not queue or queue[0] != actor or not state.mutex_held[m]:
                raise ContractViolation(f"actor {actor} unlocks a mutex it does not hold")
            return replace(
                state,
                pc=new_pc,
                mutex_queues=_set(state.mutex_queues, m, queue[1:]),
                mutex_held=_set(state.mutex_held, m, False),
            )
        if kind is ActionKind.SEM_ASYNC_ACQUIRE:
            s = action.obj.index
            return replace(state, pc=new_pc, sem_queues=_set(state.sem_queues, s, state.sem_queues[s] + (actor,)))
        if kind is ActionKind.SEM_WAIT:
            s = action.obj.index
            queue = list(state.sem_queues[s])
            queue.remove(actor)
            return replace(
                state,
                pc=new_pc,
                sem_queues=_set(state.sem_queues, s, tuple(queue)),
                sem_tokens=_set(state.sem_tokens, s, state.sem_tokens[s] - 1),
            )
        if kind is ActionKind.SEM_RELEASE:
            s = action.obj.index
            return replace(state, pc=new_pc, sem_tokens=_set(state.sem_tokens, s, state.sem_tokens[s] + 1))
        if kind is ActionKind.BARRIER_ARRIVE:
            b = action.obj.index
            generation = state.barrier_rounds[b][actor]
            arrivals = list(state.barrier_arrivals[b])
            while len(arrivals) <= generation:
                arrivals.append(0)
            arrivals[generation] += 1
            return replace(
                state,
                pc=new_pc,
                barrier_rounds=_set(state.barrier_rounds, b, _set(state.barrier_rounds[b], actor, generation + 1)),
                barrier_arrivals=_set(state.barrier_arrivals, b, tuple(arrivals)),
            )
        if kind is ActionKind.FAIL:
            return replace(state, pc=new_pc, crashed=True, fail_witness=actor)
        # Wait, WaitAll, BarrierWait and LocalStep only advance the actor.
        return replace(state, pc=new_pc)

    def _post(self, state: SimState, actor: int, pc: int, action: Action) -> SimState:
        """Post a send or receive, matching it against the oldest compatible peer."""
        b = action.obj.index
        mailbox = state.mailboxes[b]
        comm = (actor, pc)
        if action.kind is ActionKind.ASYNC_SEND:
            for position, recv in enumerate(mailbox.pending_recvs):
                wanted = self.program.actors[recv[0]][recv[1]].source_filter
                if wanted is None or wanted == actor:
                    remaining = mailbox.pending_recvs[:position] + mailbox.pending_recvs[position + 1:]
                    return self._matched(state, b, MailboxState(mailbox.pending_sends, remaining), comm, recv)
            return replace(state, mailboxes=_set(state.mailboxes, b, MailboxState(mailbox.pending_sends + (comm,), mailbox.pending_recvs)))

        for position, send in enumerate(mailbox.pending_sends):
            if action.source_filter is None or action.source_filter == send[0]:
                remaining = mailbox.pending_sends[:position] + mailbox.pending_sends[position + 1:]
                return self._matched(state, b, MailboxState(remaining, mailbox.pending_recvs), send, comm)
        return replace(state, mailboxes=_set(state.mailboxes, b, MailboxState(mailbox.pending_sends, mailbox.pending_recvs + (comm,))))

    @staticmethod
    def _matched(state: SimState, b: int, mailbox: MailboxState, send: CommId, recv: CommId) -> SimState:
        return replace(
            state,
            mailboxes=_set(state.mailboxes, b, mailbox),
            pairs=tuple(sorted(state.pairs + ((send, recv),))),
            matched=state.matched | {send, recv},
        )

    def replay(self, actors: Sequence[int], start: Optional[SimState] = None) -> SimState:
        """Step the given actors in order from start (default: the initial state)."""
        state = start if start is not None else self.initial_state()
        for index, actor in enumerate(actors, start=1):
            if not 0 <= actor < self.program.num_actors or not self.is_enabled(state, actor):
                raise ReplayError(f"actor {actor} is not enabled", index=index)
            state = self.step(state, actor)
        return state

    def states_along(self, actors: Sequence[int]) -> List[SimState]:
        """States s_0 .. s_n visited by replaying actors."""
        states = [self.initial_state()]
        for index, actor in enumerate(actors, start=1):
            if not 0 <= actor < self.program.num_actors or not self.is_enabled(states[-1], actor):
                raise ReplayError(f"actor {actor} is not enabled", index=index)
            states.append(self.step(states[-1], actor))
        return states

    def classify_state(self, state: SimState) -> RunOutcome:
        if self.enabled(state):
            raise ContractViolation("state is not maximal", metadata={"pc": state.pc})
        if state.crashed:
            return RunOutcome.CRASH
        if any(not self.finished(state, a) for a in range(self.program.num_actors)):
            return RunOutcome.DEADLOCK
        return RunOutcome.SAFE

    def classify(self, execution: Execution) -> RunOutcome:
        return self.classify_state(self.replay(execution.actors))


def _set(values: tuple, index: int, value) -> tuple:
    return values[:index] + (value,) + values[index + 1:]


def initial_state(program: Program) -> SimState:
    return Simulator(program).initial_state()


def replay(program: Program, actors: Sequence[int]) -> SimState:
    return Simulator(program).replay(actors)


def classify(program: Program, execution: Execution) -> RunOutcome:
    return Simulator(program).classify(execution)
