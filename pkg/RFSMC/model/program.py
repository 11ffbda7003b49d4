"""Programs: a fixed set of actors, each a finite sequence of actions."""

from dataclasses import dataclass, replace
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

from RFSMC.model.actions import (
    COMM_WAITS,
    POSTS,
    Action,
    ActionKind,
    ObjectId,
    ObjectKind,
)
from RFSMC.shared.errors import ProgramValidationError


@dataclass(frozen=True, slots=True)
class ObjectDecl:
    obj: ObjectId
    name: str
    tokens: int = 0
    capacity: int = 0


@dataclass(frozen=True)
class Program:
    objects: Tuple[ObjectDecl, ...]
    actors: Tuple[Tuple[Action, ...], ...]
    actor_names: Tuple[str, ...]

    @property
    def num_actors(self) -> int:
        return len(self.actors)

    @property
    def statement_count(self) -> int:
        return sum(len(stmts) for stmts in self.actors)

    @cached_property
    def _decls(self) -> Dict[ObjectId, ObjectDecl]:
        return {decl.obj: decl for decl in self.objects}

    def decl(self, obj: ObjectId) -> ObjectDecl:
        try:
            return self._decls[obj]
        except KeyError:
            raise ProgramValidationError(f"undeclared object {obj}") from None

    def count(self, kind: ObjectKind) -> int:
        return sum(1 for decl in self.objects if decl.obj.kind is kind)

    def actor_index(self, name: str) -> int:
        try:
            return self.actor_names.index(name)
        except ValueError:
            raise ProgramValidationError(f"unknown actor '{name}'") from None

    def action_at(self, actor: int, pc: int) -> Action:
        return self.actors[actor][pc]

    @cached_property
    def dependency_table(self):
        """Static dependency between every pair of statements (built once)."""
        from RFSMC.deps.dependency import DependencyTable

        return DependencyTable(self)

    def validate(self) -> "Program":
        """Check well-formedness; returns self so calls can be chained."""
        if not self.actors:
            raise ProgramValidationError("a program needs at least one actor")
        if len(self.actor_names) != len(self.actors):
            raise ProgramValidationError("one name per actor is required")
        if len(set(self.actor_names)) != len(self.actor_names):
            raise ProgramValidationError("actor names must be unique")

        for kind in ObjectKind:
            indices = sorted(d.obj.index for d in self.objects if d.obj.kind is kind)
            if indices != list(range(len(indices))):
                raise ProgramValidationError(f"{kind.value} objects must be numbered densely from 0")
        for decl in self.objects:
            if decl.obj.kind is ObjectKind.SEMAPHORE and decl.tokens < 0:
                raise ProgramValidationError(f"semaphore {decl.name} has negative tokens")
            if decl.obj.kind is ObjectKind.BARRIER and decl.capacity < 1:
                raise ProgramValidationError(f"barrier {decl.name} needs a positive size")

        for actor, stmts in enumerate(self.actors):
            self._validate_actor(actor, stmts)
        return self

    @staticmethod
    def _invalid(actor: int, pc: int, message: str) -> ProgramValidationError:
        return ProgramValidationError(message, metadata={"actor": actor, "statement": pc})

    def _validate_actor(self, actor: int, stmts: Sequence[Action]) -> None:
        name = self.actor_names[actor]
        mutex_phase: Dict[ObjectId, str] = {}
        sem_phase: Dict[ObjectId, str] = {}
        sem_held: Dict[ObjectId, int] = {}
        barrier_pending: Dict[ObjectId, bool] = {}

        for pc, action in enumerate(stmts):
            where = f"actor {name}, statement {pc}"
            for obj in action.objects:
                if obj not in self._decls:
                    raise self._invalid(actor, pc, f"{where}: undeclared object {obj}")
            if action.source_filter is not None and not 0 <= action.source_filter < self.num_actors:
                raise self._invalid(actor, pc, f"{where}: source filter {action.source_filter} out of range")

            kind = action.kind
            if kind in COMM_WAITS:
                for ref, mailbox in zip(action.comm_refs, action.comm_objects):
                    if not 0 <= ref < pc or stmts[ref].kind not in POSTS:
                        raise self._invalid(actor, pc, f"{where}: waits on statement {ref}, which is not an earlier post")
                    if stmts[ref].obj != mailbox:
                        raise self._invalid(actor, pc, f"{where}: communication {ref} targets {stmts[ref].obj}, not {mailbox}")
            elif kind is ActionKind.MUTEX_ASYNC_LOCK:
                if mutex_phase.get(action.obj, "idle") != "idle":
                    raise self._invalid(actor, pc, f"{where}: {self.decl(action.obj).name} requested twice")
                mutex_phase[action.obj] = "requested"
            elif kind is ActionKind.MUTEX_WAIT:
                if mutex_phase.get(action.obj) != "requested":
                    raise self._invalid(actor, pc, f"{where}: mutex_wait without a pending async_lock")
                mutex_phase[action.obj] = "held"
            elif kind is ActionKind.MUTEX_UNLOCK:
                if mutex_phase.get(action.obj) != "held":
                    raise self._invalid(actor, pc, f"{where}: unlock of a mutex not held")
                mutex_phase[action.obj] = "idle"
            elif kind is ActionKind.SEM_ASYNC_ACQUIRE:
                if sem_phase.get(action.obj, "idle") != "idle":
                    raise self._invalid(actor, pc, f"{where}: {self.decl(action.obj).name} requested twice")
                sem_phase[action.obj] = "requested"
            elif kind is ActionKind.SEM_WAIT:
                if sem_phase.get(action.obj) != "requested":
                    raise self._invalid(actor, pc, f"{where}: sem_wait without a pending async_acquire")
                sem_phase[action.obj] = "idle"
                sem_held[action.obj] = sem_held.get(action.obj, 0) + 1
            elif kind is ActionKind.SEM_RELEASE:
                if sem_held.get(action.obj, 0) == 0:
                    raise self._invalid(actor, pc, f"{where}: release without a completed sem_wait")
                sem_held[action.obj] -= 1
            elif kind is ActionKind.BARRIER_ARRIVE:
                if barrier_pending.get(action.obj):
                    raise self._invalid(actor, pc, f"{where}: arrive twice without barrier_wait")
                barrier_pending[action.obj] = True
            elif kind is ActionKind.BARRIER_WAIT:
                if not barrier_pending.get(action.obj):
                    raise self._invalid(actor, pc, f"{where}: barrier_wait without arrive")
                barrier_pending[action.obj] = False


ObjectRef = Union[str, ObjectId]


class ActorBuilder:
    """Appends statements to one actor; every method returns the builder."""

    def __init__(self, program: "ProgramBuilder", name: str):
        self._program = program
        self.name = name
        self.actions: List[Action] = []
        self._vars: Dict[str, int] = {}
        self._sources: Dict[int, str] = {}

    def _bind(self, var: Optional[str]) -> None:
        if var is None:
            return
        if var in self._vars:
            raise ProgramValidationError(f"actor {self.name}: variable '{var}' bound twice")
        self._vars[var] = len(self.actions)

    def _emit(self, action: Action) -> "ActorBuilder":
        self.actions.append(action)
        return self

    def send(self, mailbox: ObjectRef, var: Optional[str] = None) -> "ActorBuilder":
        obj = self._program.resolve(mailbox, ObjectKind.MAILBOX)
        self._bind(var)
        return self._emit(Action(ActionKind.ASYNC_SEND, obj, var=var))

    def recv(self, mailbox: ObjectRef, source: Union[None, int, str] = None, var: Optional[str] = None) -> "ActorBuilder":
        obj = self._program.resolve(mailbox, ObjectKind.MAILBOX)
        self._bind(var)
        if isinstance(source, str):
            self._sources[len(self.actions)] = source
            source = None
        return self._emit(Action(ActionKind.ASYNC_RECV, obj, source_filter=source, var=var))

    def _comm(self, var: str) -> Tuple[int, ObjectId]:
        if var not in self._vars:
            raise ProgramValidationError(f"actor {self.name}: wait on unknown variable '{var}'")
        ref = self._vars[var]
        return ref, self.actions[ref].obj

    def wait(self, var: str) -> "ActorBuilder":
        ref, obj = self._comm(var)
        return self._emit(Action(ActionKind.WAIT, comm_refs=(ref,), comm_objects=(obj,)))

    def wait_all(self, *vars: str) -> "ActorBuilder":
        comms = [self._comm(var) for var in vars]
        return self._emit(Action(
            ActionKind.WAIT_ALL,
            comm_refs=tuple(ref for ref, _ in comms),
            comm_objects=tuple(obj for _, obj in comms),
        ))

    def async_lock(self, mutex: ObjectRef) -> "ActorBuilder":
        return self._emit(Action(ActionKind.MUTEX_ASYNC_LOCK, self._program.resolve(mutex, ObjectKind.MUTEX)))

    def mutex_wait(self, mutex: ObjectRef) -> "ActorBuilder":
        return self._emit(Action(ActionKind.MUTEX_WAIT, self._program.resolve(mutex, ObjectKind.MUTEX)))

    def unlock(self, mutex: ObjectRef) -> "ActorBuilder":
        return self._emit(Action(ActionKind.MUTEX_UNLOCK, self._program.resolve(mutex, ObjectKind.MUTEX)))

    def lock(self, mutex: ObjectRef) -> "ActorBuilder":
        return self.async_lock(mutex).mutex_wait(mutex)

    def async_acquire(self, semaphore: ObjectRef) -> "ActorBuilder":
        return self._emit(Action(ActionKind.SEM_ASYNC_ACQUIRE, self._program.resolve(semaphore, ObjectKind.SEMAPHORE)))

    def sem_wait(self, semaphore: ObjectRef) -> "ActorBuilder":
        return self._emit(Action(ActionKind.SEM_WAIT, self._program.resolve(semaphore, ObjectKind.SEMAPHORE)))

    def release(self, semaphore: ObjectRef) -> "ActorBuilder":
        return self._emit(Action(ActionKind.SEM_RELEASE, self._program.resolve(semaphore, ObjectKind.SEMAPHORE)))

    def acquire(self, semaphore: ObjectRef) -> "ActorBuilder":
        return self.async_acquire(semaphore).sem_wait(semaphore)

    def arrive(self, barrier: ObjectRef) -> "ActorBuilder":
        return self._emit(Action(ActionKind.BARRIER_ARRIVE, self._program.resolve(barrier, ObjectKind.BARRIER)))

    def barrier_wait(self, barrier: ObjectRef) -> "ActorBuilder":
        return self._emit(Action(ActionKind.BARRIER_WAIT, self._program.resolve(barrier, ObjectKind.BARRIER)))

    def barrier(self, barrier: ObjectRef) -> "ActorBuilder":
        return self.arrive(barrier).barrier_wait(barrier)

    def local(self, count: int = 1) -> "ActorBuilder":
        for _ in range(count):
            self._emit(Action(ActionKind.LOCAL_STEP))
        return self

    def fail(self) -> "ActorBuilder":
        return self._emit(Action(ActionKind.FAIL))

    def finish(self, actor_names: Sequence[str]) -> Tuple[Action, ...]:
        actions = list(self.actions)
        for position, source in self._sources.items():
            if source not in actor_names:
                raise ProgramValidationError(f"actor {self.name}: recv from unknown actor '{source}'")
            actions[position] = replace(actions[position], source_filter=list(actor_names).index(source))
        return tuple(actions)


class ProgramBuilder:
    """Declares objects and actors, then builds a validated Program.

    Example:
        builder = ProgramBuilder()
        m = builder.mailbox("m")
        builder.actor("P1").send(m)
        builder.actor("P2").recv(m, var="x").wait("x")
        program = builder.build()
    """

    def __init__(self):
        self._objects: List[ObjectDecl] = []
        self._by_name: Dict[str, ObjectDecl] = {}
        self._actors: List[ActorBuilder] = []

    def _declare(self, kind: ObjectKind, name: str, tokens: int = 0, capacity: int = 0) -> ObjectId:
        if name in self._by_name:
            raise ProgramValidationError(f"object '{name}' declared twice")
        obj = ObjectId(kind, sum(1 for d in self._objects if d.obj.kind is kind))
        decl = ObjectDecl(obj, name, tokens=tokens, capacity=capacity)
        self._objects.append(decl)
        self._by_name[name] = decl
        return obj

    def mailbox(self, name: str) -> ObjectId:
        return self._declare(ObjectKind.MAILBOX, name)

    def mutex(self, name: str) -> ObjectId:
        return self._declare(ObjectKind.MUTEX, name)

    def semaphore(self, name: str, tokens: int) -> ObjectId:
        return self._declare(ObjectKind.SEMAPHORE, name, tokens=tokens)

    def barrier(self, name: str, size: int) -> ObjectId:
        return self._declare(ObjectKind.BARRIER, name, capacity=size)

    def has_object(self, name: str) -> bool:
        return name in self._by_name

    def resolve(self, ref: ObjectRef, kind: ObjectKind) -> ObjectId:
        if isinstance(ref, ObjectId):
            obj = ref
        elif ref in self._by_name:
            obj = self._by_name[ref].obj
        else:
            raise ProgramValidationError(f"undeclared {kind.value} '{ref}'")
        if obj.kind is not kind:
            raise ProgramValidationError(f"'{ref}' is a {obj.kind.value}, expected a {kind.value}")
        return obj

    def actor(self, name: str) -> ActorBuilder:
        if any(existing.name == name for existing in self._actors):
            raise ProgramValidationError(f"actor '{name}' declared twice")
        builder = ActorBuilder(self, name)
        self._actors.append(builder)
        return builder

    def build(self) -> Program:
        names = tuple(actor.name for actor in self._actors)
        program = Program(
            objects=tuple(self._objects),
            actors=tuple(actor.finish(names) for actor in self._actors),
            actor_names=names,
        )
        return program.validate()
