"""Render a Program back to program text.

Adjacent primitive pairs are folded back into their sugar (lock, acquire,
barrier), so emitting a parsed program reproduces the emitted text.
"""

from typing import List, Sequence

from RFSMC.model.actions import COMM_WAITS, POSTS, Action, ActionKind
from RFSMC.model.program import Program

INDENT = "    "

_SUGAR = {
    (ActionKind.MUTEX_ASYNC_LOCK, ActionKind.MUTEX_WAIT): "lock",
    (ActionKind.SEM_ASYNC_ACQUIRE, ActionKind.SEM_WAIT): "acquire",
    (ActionKind.BARRIER_ARRIVE, ActionKind.BARRIER_WAIT): "barrier",
}

_KEYWORDS = {
    ActionKind.MUTEX_ASYNC_LOCK: "async_lock",
    ActionKind.MUTEX_WAIT: "mutex_wait",
    ActionKind.MUTEX_UNLOCK: "unlock",
    ActionKind.SEM_ASYNC_ACQUIRE: "async_acquire",
    ActionKind.SEM_WAIT: "sem_wait",
    ActionKind.SEM_RELEASE: "release",
    ActionKind.BARRIER_ARRIVE: "arrive",
    ActionKind.BARRIER_WAIT: "barrier_wait",
}


def _variables(stmts: Sequence[Action]) -> List[str]:
    """Variable name per statement; waited posts without a name get one."""
    waited = {ref for action in stmts if action.kind in COMM_WAITS for ref in action.comm_refs}
    taken = {action.var for action in stmts if action.var}
    names = []
    for pc, action in enumerate(stmts):
        name = action.var
        if name is None and pc in waited:
            name = f"c{pc}"
            while name in taken:
                name += "_"
            taken.add(name)
        names.append(name)
    return names


def emit_actor(program: Program, actor: int) -> List[str]:
    stmts = program.actors[actor]
    names = _variables(stmts)
    lines = [f"actor {program.actor_names[actor]}:"]
    pc = 0
    while pc < len(stmts):
        action = stmts[pc]
        following = stmts[pc + 1] if pc + 1 < len(stmts) else None
        sugar = _SUGAR.get((action.kind, following.kind)) if following is not None else None
        if sugar is not None and following.obj == action.obj:
            lines.append(f"{INDENT}{sugar} {program.decl(action.obj).name}")
            pc += 2
            continue

        if action.kind in POSTS:
            text = f"{'send' if action.kind is ActionKind.ASYNC_SEND else 'recv'} {program.decl(action.obj).name}"
            if action.source_filter is not None:
                text += f" from {program.actor_names[action.source_filter]}"
            if names[pc] is not None:
                text += f" -> {names[pc]}"
        elif action.kind is ActionKind.WAIT:
            text = f"wait {names[action.comm_refs[0]]}"
        elif action.kind is ActionKind.WAIT_ALL:
            text = "waitall " + " ".join(names[ref] for ref in action.comm_refs)
        elif action.kind is ActionKind.LOCAL_STEP:
            text = "local"
        elif action.kind is ActionKind.FAIL:
            text = "fail"
        else:
            text = f"{_KEYWORDS[action.kind]} {program.decl(action.obj).name}"
        lines.append(INDENT + text)
        pc += 1
    return lines


def emit_program(program: Program) -> str:
    """Program text accepted by parse_program."""
    lines = [f"actors {program.num_actors}", ""]
    for decl in program.objects:
        kind = decl.obj.kind.value
        if kind == "semaphore":
            lines.append(f"semaphore {decl.name} tokens {decl.tokens}")
        elif kind == "barrier":
            lines.append(f"barrier {decl.name} size {decl.capacity}")
        else:
            lines.append(f"{kind} {decl.name}")
    if program.objects:
        lines.append("")
    for actor in range(program.num_actors):
        lines.extend(emit_actor(program, actor))
        lines.append("")
    return "\n".join(lines)
