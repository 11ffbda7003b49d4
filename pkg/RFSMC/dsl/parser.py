"""Line-oriented program text.

    actors 3
    mailbox m
    actor P1:
        send m
    actor P3:
        recv m from P2 -> b
        wait b

The header comes first, object declarations precede the actor blocks and
statements are indented under their actor. ``#`` starts a comment.
"""

import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from RFSMC.model.program import ActorBuilder, Program, ProgramBuilder
from RFSMC.shared.errors import DslSyntaxError, ProgramValidationError

_TOKEN = re.compile(r"\s*(?:(->)|([A-Za-z_][A-Za-z0-9_]*)|(\d+)|(:)|(\S))")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

DECLARATIONS = ("mailbox", "mutex", "semaphore", "barrier")


@dataclass(frozen=True)
class Token:
    text: str
    column: int


@dataclass
class SourceLine:
    number: int
    indented: bool
    tokens: List[Token]

    @property
    def keyword(self) -> Token:
        return self.tokens[0]


def tokenize(text: str) -> List[SourceLine]:
    """Split text into non-empty lines of tokens; columns are 1-based."""
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        tokens = []
        position = 0
        while position < len(body):
            match = _TOKEN.match(body, position)
            if match is None:
                break
            if match.group(5) is not None:
                raise DslSyntaxError(f"unexpected character '{match.group(5)}'", number, match.start(5) + 1)
            start = next(match.start(g) for g in range(1, 5) if match.group(g) is not None)
            tokens.append(Token(match.group(0).strip(), start + 1))
            position = match.end()
        lines.append(SourceLine(number, body[0].isspace(), tokens))
    return lines


class _Parser:
    def __init__(self, text: str):
        self.lines = tokenize(text)
        self.builder = ProgramBuilder()
        self.actor_names: List[str] = []
        # (actor, primitive statement index) -> source line
        self.origins: List[List[int]] = []
        self.statements: Dict[str, Callable[[ActorBuilder, SourceLine], None]] = {
            "send": self._send,
            "recv": self._recv,
            "wait": self._wait,
            "waitall": self._waitall,
            "lock": self._object_statement(ActorBuilder.lock),
            "async_lock": self._object_statement(ActorBuilder.async_lock),
            "mutex_wait": self._object_statement(ActorBuilder.mutex_wait),
            "unlock": self._object_statement(ActorBuilder.unlock),
            "acquire": self._object_statement(ActorBuilder.acquire),
            "async_acquire": self._object_statement(ActorBuilder.async_acquire),
            "sem_wait": self._object_statement(ActorBuilder.sem_wait),
            "release": self._object_statement(ActorBuilder.release),
            "barrier": self._object_statement(ActorBuilder.barrier),
            "arrive": self._object_statement(ActorBuilder.arrive),
            "barrier_wait": self._object_statement(ActorBuilder.barrier_wait),
            "local": self._local,
            "fail": self._fail,
        }

    def parse(self) -> Program:
        if not self.lines:
            raise DslSyntaxError("empty program, expected 'actors <n>'", 1)
        header = self.lines[0]
        if header.indented or header.keyword.text != "actors" or len(header.tokens) != 2 or not header.tokens[1].text.isdigit():
            raise DslSyntaxError("expected 'actors <n>' as the first line", header.number, header.keyword.column)
        declared = int(header.tokens[1].text)

        self._collect_actor_names(self.lines[1:])
        if declared != len(self.actor_names):
            raise ProgramValidationError(
                f"header declares {declared} actors, found {len(self.actor_names)}",
                line=header.number,
                column=header.tokens[1].column,
            )

        current: Optional[ActorBuilder] = None
        for line in self.lines[1:]:
            keyword = line.keyword.text
            if line.indented:
                if current is None:
                    raise DslSyntaxError("statement outside an actor block", line.number, line.keyword.column)
                self._statement(current, line)
            elif keyword == "actor":
                current = self._with_location(line, line.tokens[1], lambda: self.builder.actor(line.tokens[1].text))
                self.origins.append([])
            elif keyword in DECLARATIONS:
                if current is not None:
                    raise DslSyntaxError("declarations must precede actor blocks", line.number, line.keyword.column)
                self._declaration(line)
            else:
                raise DslSyntaxError(f"unknown keyword '{keyword}'", line.number, line.keyword.column)

        try:
            return self.builder.build()
        except ProgramValidationError as exc:
            actor = exc.metadata.get("actor")
            statement = exc.metadata.get("statement")
            if actor is None or statement is None:
                raise
            number = self.origins[actor][statement]
            raise ProgramValidationError(exc.message, line=number, column=1) from exc

    def _collect_actor_names(self, lines: List[SourceLine]) -> None:
        for line in lines:
            if line.indented or line.keyword.text != "actor":
                continue
            tokens = line.tokens
            if len(tokens) != 3 or not _NAME.match(tokens[1].text) or tokens[2].text != ":":
                raise DslSyntaxError("expected 'actor <name>:'", line.number, line.keyword.column)
            if tokens[1].text in self.actor_names:
                raise ProgramValidationError(f"actor '{tokens[1].text}' declared twice", line=line.number, column=tokens[1].column)
            self.actor_names.append(tokens[1].text)

    def _declaration(self, line: SourceLine) -> None:
        kind = line.keyword.text
        tokens = line.tokens
        if kind in ("mailbox", "mutex"):
            self._arity(line, 2, f"{kind} <name>")
            name = self._name(line, 1)
            declare = getattr(self.builder, kind)
            self._with_location(line, tokens[1], lambda: declare(name))
            return

        keyword = "tokens" if kind == "semaphore" else "size"
        self._arity(line, 4, f"{kind} <name> {keyword} <k>")
        name = self._name(line, 1)
        if tokens[2].text != keyword:
            raise DslSyntaxError(f"expected '{keyword}'", line.number, tokens[2].column)
        value = self._int(line, 3)
        if kind == "semaphore":
            self._with_location(line, tokens[1], lambda: self.builder.semaphore(name, value))
        else:
            if value < 1:
                raise ProgramValidationError(f"barrier '{name}' needs a positive size", line=line.number, column=tokens[3].column)
            self._with_location(line, tokens[1], lambda: self.builder.barrier(name, value))

    def _statement(self, actor: ActorBuilder, line: SourceLine) -> None:
        handler = self.statements.get(line.keyword.text)
        if handler is None:
            raise DslSyntaxError(f"unknown statement '{line.keyword.text}'", line.number, line.keyword.column)
        before = len(actor.actions)
        handler(actor, line)
        self.origins[-1].extend([line.number] * (len(actor.actions) - before))

    def _send(self, actor: ActorBuilder, line: SourceLine) -> None:
        if len(line.tokens) not in (2, 4):
            raise DslSyntaxError("expected 'send <mailbox> [-> <var>]'", line.number, line.keyword.column)
        mailbox = self._name(line, 1)
        var = self._binding(line, 2)
        self._with_location(line, line.tokens[1], lambda: actor.send(mailbox, var=var))

    def _recv(self, actor: ActorBuilder, line: SourceLine) -> None:
        tokens = line.tokens
        usage = "expected 'recv <mailbox> [from <actor>] [-> <var>]'"
        if len(tokens) < 2:
            raise DslSyntaxError(usage, line.number, line.keyword.column)
        mailbox = self._name(line, 1)
        position = 2
        source = None
        if position < len(tokens) and tokens[position].text == "from":
            if position + 1 >= len(tokens):
                raise DslSyntaxError(usage, line.number, tokens[position].column)
            source = self._name(line, position + 1)
            if source not in self.actor_names:
                raise ProgramValidationError(
                    f"recv from unknown actor '{source}'", line=line.number, column=tokens[position + 1].column
                )
            position += 2
        var = self._binding(line, position)
        if position < len(tokens) and var is None:
            raise DslSyntaxError(usage, line.number, tokens[position].column)
        self._with_location(line, tokens[1], lambda: actor.recv(mailbox, source=source, var=var))

    def _wait(self, actor: ActorBuilder, line: SourceLine) -> None:
        self._arity(line, 2, "wait <var>")
        var = self._name(line, 1)
        self._with_location(line, line.tokens[1], lambda: actor.wait(var))

    def _waitall(self, actor: ActorBuilder, line: SourceLine) -> None:
        if len(line.tokens) < 2:
            raise DslSyntaxError("expected 'waitall <var>...'", line.number, line.keyword.column)
        names = [self._name(line, i) for i in range(1, len(line.tokens))]
        self._with_location(line, line.tokens[1], lambda: actor.wait_all(*names))

    def _object_statement(self, method: Callable[[ActorBuilder, str], ActorBuilder]):
        def handler(actor: ActorBuilder, line: SourceLine) -> None:
            self._arity(line, 2, f"{line.keyword.text} <name>")
            name = self._name(line, 1)
            self._with_location(line, line.tokens[1], lambda: method(actor, name))

        return handler

    def _local(self, actor: ActorBuilder, line: SourceLine) -> None:
        if len(line.tokens) > 2:
            raise DslSyntaxError("expected 'local [<count>]'", line.number, line.tokens[2].column)
        actor.local(self._int(line, 1) if len(line.tokens) == 2 else 1)

    def _fail(self, actor: ActorBuilder, line: SourceLine) -> None:
        self._arity(line, 1, "fail")
        actor.fail()

    def _binding(self, line: SourceLine, position: int) -> Optional[str]:
        """Parse an optional trailing '-> <var>' at position."""
        tokens = line.tokens
        if position >= len(tokens) or tokens[position].text != "->":
            return None
        if len(tokens) != position + 2:
            raise DslSyntaxError("expected a single variable after '->'", line.number, tokens[position].column)
        return self._name(line, position + 1)

    def _arity(self, line: SourceLine, count: int, usage: str) -> None:
        if len(line.tokens) != count:
            raise DslSyntaxError(f"expected '{usage}'", line.number, line.keyword.column)

    def _name(self, line: SourceLine, position: int) -> str:
        token = line.tokens[position]
        if not _NAME.match(token.text):
            raise DslSyntaxError(f"expected a name, got '{token.text}'", line.number, token.column)
        return token.text

    def _int(self, line: SourceLine, position: int) -> int:
        token = line.tokens[position]
        if not token.text.isdigit():
            raise DslSyntaxError(f"expected a number, got '{token.text}'", line.number, token.column)
        return int(token.text)

    @staticmethod
    def _with_location(line: SourceLine, token: Token, call: Callable):
        try:
            return call()
        except DslSyntaxError:
            raise
        except ProgramValidationError as exc:
            raise ProgramValidationError(exc.message, line=line.number, column=token.column) from exc


def parse_program(text: str) -> Program:
    """Parse program text into a validated Program.

    Sugar statements (lock, acquire, barrier) expand to their two primitive
    statements. Raises DslSyntaxError or ProgramValidationError carrying the
    line and column of the offending token.
    """
    return _Parser(text).parse()


def parse_file(path: str) -> Program:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_program(handle.read())

