"""Benchmark program generators.

Actors are named P1..Pn. Every generator returns a validated Program.
"""

import random
from dataclasses import dataclass
from typing import Callable, Dict, List

from RFSMC.model.program import ActorBuilder, Program, ProgramBuilder


def mpi_any(k: int = 0, pad: int = 0) -> Program:
    """Two senders and a receiver taking the first message from anyone.

    P3 receives from any sender, then specifically from P2. The program
    deadlocks when P2's message is the one matched first. k rounds of a
    shared barrier sit between the sends and P3's receives; pad adds local
    steps after each send.
    """
    if k < 0 or pad < 0:
        raise ValueError("k and pad must be non-negative")
    builder = ProgramBuilder()
    mailbox = builder.mailbox("m")
    rendezvous = builder.barrier("rdv", 3) if k else None
    p1 = builder.actor("P1").send(mailbox).local(pad)
    p2 = builder.actor("P2").send(mailbox).local(pad)
    p3 = builder.actor("P3")
    for _ in range(k):
        for actor in (p1, p2, p3):
            actor.barrier(rendezvous)
    p3.recv(mailbox, var="a").wait("a").recv(mailbox, source="P2", var="b").wait("b")
    return builder.build()


def _philosophers(n: int, with_semaphore: bool) -> Program:
    if n < 2:
        raise ValueError("philosophers need n >= 2")
    builder = ProgramBuilder()
    forks = [builder.mutex(f"fork{i}") for i in range(n)]
    seats = builder.semaphore("seats", n) if with_semaphore else None
    for i in range(n):
        philosopher = builder.actor(f"P{i + 1}")
        first, second = forks[i], forks[(i + 1) % n]
        if seats is not None:
            philosopher.acquire(seats)
        philosopher.lock(first).lock(second).local().unlock(first).unlock(second)
        if seats is not None:
            philosopher.release(seats)
    return builder.build()


def philosophers_mutex(n: int) -> Program:
    """Philosopher i locks fork i, then fork (i+1) mod n, eats and unlocks both."""
    return _philosophers(n, with_semaphore=False)


def philosophers_semaphore(n: int) -> Program:
    """philosophers_mutex wrapped in a semaphore with n tokens (not restrictive)."""
    return _philosophers(n, with_semaphore=True)


def factorial_bench(n: int) -> Program:
    """n actors each sending once to one mailbox: n! classes."""
    if n < 1:
        raise ValueError("factorial_bench needs n >= 1")
    builder = ProgramBuilder()
    mailbox = builder.mailbox("m")
    for i in range(n):
        builder.actor(f"P{i + 1}").send(mailbox)
    return builder.build()


def busy_wait(k: int = 1) -> Program:
    """mpi_any where both senders first poll a shared flag k times.

    Each poll is a lock/unlock of the flag mutex, the bounded unrolling of a
    busy-waiting loop.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    builder = ProgramBuilder()
    mailbox = builder.mailbox("m")
    flag = builder.mutex("flag")
    for name in ("P1", "P2"):
        poller = builder.actor(name)
        for _ in range(k):
            poller.lock(flag).unlock(flag)
        poller.send(mailbox)
    builder.actor("P3").recv(mailbox, var="a").wait("a").recv(mailbox, source="P2", var="b").wait("b")
    return builder.build()


def four_actor_deadlock() -> Program:
    """Two unrelated lock-order inversions; both must fire for a deadlock."""
    builder = ProgramBuilder()
    a, b, c, d = (builder.mutex(name) for name in ("a", "b", "c", "d"))
    builder.actor("P1").lock(a).lock(b).unlock(a).unlock(b)
    builder.actor("P2").lock(b).lock(a).unlock(b).unlock(a)
    builder.actor("P3").lock(c).lock(d).unlock(c).unlock(d)
    builder.actor("P4").lock(d).lock(c).unlock(d).unlock(c)
    return builder.build()


def all_faulty(n: int = 2) -> Program:
    """Every maximal execution crashes: n actors meet at a barrier, then P1 fails."""
    if n < 1:
        raise ValueError("all_faulty needs n >= 1")
    builder = ProgramBuilder()
    meet = builder.barrier("meet", n)
    for i in range(n):
        actor = builder.actor(f"P{i + 1}").barrier(meet)
        if i == 0:
            actor.fail()
        else:
            actor.local()
    return builder.build()


@dataclass(frozen=True)
class RandomBounds:
    max_actors: int = 3
    max_statements: int = 12
    allow_fail: bool = False


def random_program(seed: int, bounds: RandomBounds = RandomBounds()) -> Program:
    """Well-formed random program within bounds (primitive statement count).

    Locks and acquires are always paired with an unlock or release, and
    waits only refer to communications posted earlier by the same actor.
    """
    rng = random.Random(seed)
    n_actors = rng.randint(2, max(2, bounds.max_actors))
    builder = ProgramBuilder()
    mailboxes = [builder.mailbox(f"m{i}") for i in range(rng.randint(1, 2))]
    mutex = builder.mutex("mu")
    semaphore = builder.semaphore("s", rng.randint(1, 2))
    names = [f"P{i + 1}" for i in range(n_actors)]
    actors = [builder.actor(name) for name in names]
    counters = [0] * n_actors

    def fresh(index: int) -> str:
        counters[index] += 1
        return f"c{counters[index]}"

    def send_wait(index: int, actor: ActorBuilder) -> None:
        var = fresh(index)
        actor.send(rng.choice(mailboxes), var=var).wait(var)

    def recv_wait(index: int, actor: ActorBuilder) -> None:
        var = fresh(index)
        source = rng.choice([None] + [n for i, n in enumerate(names) if i != index])
        actor.recv(rng.choice(mailboxes), source=source, var=var).wait(var)

    templates: List[tuple] = [
        (1, lambda i, a: a.local()),
        (1, lambda i, a: a.send(rng.choice(mailboxes))),
        (2, send_wait),
        (2, recv_wait),
        (3, lambda i, a: a.lock(mutex).unlock(mutex)),
        (4, lambda i, a: a.lock(mutex).local().unlock(mutex)),
        (3, lambda i, a: a.acquire(semaphore).release(semaphore)),
    ]
    if bounds.allow_fail:
        templates.append((1, lambda i, a: a.fail()))

    budget = rng.randint(n_actors, max(n_actors, bounds.max_statements))
    used = 0
    while True:
        affordable = [t for t in templates if used + t[0] <= budget]
        if not affordable:
            break
        cost, emit = rng.choice(affordable)
        index = rng.randrange(n_actors)
        emit(index, actors[index])
        used += cost
    return builder.build()


@dataclass(frozen=True)
class BenchmarkSpec:
    name: str
    generator: Callable[[int], Program]
    scale_help: str
    default_scale: int


BENCHMARKS: Dict[str, BenchmarkSpec] = {
    spec.name: spec
    for spec in (
        BenchmarkSpec("mpi_any", mpi_any, "barrier rounds", 0),
        BenchmarkSpec("philosophers_mutex", philosophers_mutex, "philosophers", 2),
        BenchmarkSpec("philosophers_semaphore", philosophers_semaphore, "philosophers", 2),
        BenchmarkSpec("factorial", factorial_bench, "senders", 4),
        BenchmarkSpec("busy_wait", busy_wait, "polls per sender", 1),
        BenchmarkSpec("four_actor_deadlock", lambda _scale: four_actor_deadlock(), "unused", 0),
        BenchmarkSpec("all_faulty", all_faulty, "actors", 2),
        BenchmarkSpec("random", random_program, "seed", 0),
    )
}


def generate(name: str, scale: int) -> Program:
    try:
        spec = BENCHMARKS[name]
    except KeyError:
        raise ValueError(f"unknown benchmark '{name}', expected one of {', '.join(sorted(BENCHMARKS))}") from None
    return spec.generator(scale)
