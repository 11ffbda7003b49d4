"""Actor actions and shared-object identifiers."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from RFSMC.shared.errors import ProgramValidationError


class ObjectKind(str, Enum):
    MAILBOX = "mailbox"
    MUTEX = "mutex"
    SEMAPHORE = "semaphore"
    BARRIER = "barrier"


@dataclass(frozen=True, slots=True, order=True)
class ObjectId:
    """A shared object, numbered per kind in declaration order."""
    kind: ObjectKind
    index: int

    def __str__(self) -> str:
        return f"{self.kind.value}#{self.index}"


class ActionKind(str, Enum):
    ASYNC_SEND = "AsyncSend"
    ASYNC_RECV = "AsyncRecv"
    WAIT = "Wait"
    WAIT_ALL = "WaitAll"
    MUTEX_ASYNC_LOCK = "MutexAsyncLock"
    MUTEX_WAIT = "MutexWait"
    MUTEX_UNLOCK = "MutexUnlock"
    SEM_ASYNC_ACQUIRE = "SemAsyncAcquire"
    SEM_WAIT = "SemWait"
    SEM_RELEASE = "SemRelease"
    BARRIER_ARRIVE = "BarrierArrive"
    BARRIER_WAIT = "BarrierWait"
    LOCAL_STEP = "LocalStep"
    FAIL = "Fail"


POSTS = frozenset({ActionKind.ASYNC_SEND, ActionKind.ASYNC_RECV})
COMM_WAITS = frozenset({ActionKind.WAIT, ActionKind.WAIT_ALL})
MUTEX_ACTIONS = frozenset({ActionKind.MUTEX_ASYNC_LOCK, ActionKind.MUTEX_WAIT, ActionKind.MUTEX_UNLOCK})
SEMAPHORE_ACTIONS = frozenset({ActionKind.SEM_ASYNC_ACQUIRE, ActionKind.SEM_WAIT, ActionKind.SEM_RELEASE})
BARRIER_ACTIONS = frozenset({ActionKind.BARRIER_ARRIVE, ActionKind.BARRIER_WAIT})

_OBJECT_KIND_OF = {
    **{kind: ObjectKind.MAILBOX for kind in POSTS},
    **{kind: ObjectKind.MUTEX for kind in MUTEX_ACTIONS},
    **{kind: ObjectKind.SEMAPHORE for kind in SEMAPHORE_ACTIONS},
    **{kind: ObjectKind.BARRIER for kind in BARRIER_ACTIONS},
}

# A communication is identified by (actor, statement index) of its post.
CommId = Tuple[int, int]


@dataclass(frozen=True, slots=True)
class Action:
    """One statement of an actor.

    Wait/WaitAll reference the statement indices of earlier posts of the same
    actor (``comm_refs``) together with the mailboxes those posts target
    (``comm_objects``), so dependency can be decided from the action alone.
    """
    kind: ActionKind
    obj: Optional[ObjectId] = None
    source_filter: Optional[int] = None
    comm_refs: Tuple[int, ...] = ()
    comm_objects: Tuple[ObjectId, ...] = ()
    var: Optional[str] = None

    def __post_init__(self):
        expected = _OBJECT_KIND_OF.get(self.kind)
        if expected is not None:
            if self.obj is None or self.obj.kind is not expected:
                raise ProgramValidationError(f"{self.kind.value} needs a {expected.value}, got {self.obj}")
        elif self.obj is not None:
            raise ProgramValidationError(f"{self.kind.value} takes no object")
        if self.source_filter is not None and self.kind is not ActionKind.ASYNC_RECV:
            raise ProgramValidationError("only AsyncRecv accepts a source filter")
        if self.kind in COMM_WAITS:
            if not self.comm_refs or len(self.comm_refs) != len(self.comm_objects):
                raise ProgramValidationError(f"{self.kind.value} needs resolved communications")
            if self.kind is ActionKind.WAIT and len(self.comm_refs) != 1:
                raise ProgramValidationError("Wait takes exactly one communication")
        elif self.comm_refs:
            raise ProgramValidationError(f"{self.kind.value} takes no communications")

    @property
    def objects(self) -> Tuple[ObjectId, ...]:
        """Shared objects this action touches."""
        if self.kind in COMM_WAITS:
            return self.comm_objects
        if self.obj is None:
            return ()
        return (self.obj,)

    def describe(self) -> str:
        if self.kind in COMM_WAITS:
            return f"{self.kind.value}({', '.join(str(r) for r in self.comm_refs)})"
        if self.kind is ActionKind.ASYNC_RECV and self.source_filter is not None:
            return f"{self.kind.value}({self.obj}, from={self.source_filter})"
        if self.obj is not None:
            return f"{self.kind.value}({self.obj})"
        return self.kind.value
