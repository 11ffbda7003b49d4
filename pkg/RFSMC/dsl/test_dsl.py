"""
Unit tests for the program text parser and emitter.
"""

from pathlib import Path

import pytest

from RFSMC.bench.generators import (
    all_faulty,
    busy_wait,
    factorial_bench,
    mpi_any,
    philosophers_semaphore,
    random_program,
)
from RFSMC.dsl.emitter import emit_program
from RFSMC.dsl.parser import parse_file, parse_program, tokenize
from RFSMC.model.actions import ActionKind
from RFSMC.shared.errors import DslSyntaxError, ProgramValidationError

PROGRAMS_DIR = Path(__file__).resolve().parent.parent / "bench" / "programs"

MPI_ANY_TEXT = """\
# two senders, one picky receiver
actors 3

mailbox m

actor P1:
    send m

actor P2:
    send m

actor P3:
    recv m -> a      # from anyone
    wait a
    recv m from P2 -> b
    wait b
"""


class TestParse:
    """Tests for parse_program."""

    def test_mpi_any(self):
        program = parse_program(MPI_ANY_TEXT)
        assert program.actor_names == ("P1", "P2", "P3")
        assert len(program.actors[2]) == 4
        kinds = [action.kind for action in program.actors[2]]
        assert kinds == [ActionKind.ASYNC_RECV, ActionKind.WAIT, ActionKind.ASYNC_RECV, ActionKind.WAIT]
        assert program.actors[2][2].source_filter == 1
        assert program.actors[2][3].comm_refs == (2,)

    def test_matches_generator(self):
        assert parse_program(MPI_ANY_TEXT) == mpi_any(0)

    def test_sugar_and_declarations(self):
        program = parse_program(
            "actors 1\n"
            "mutex mu\n"
            "semaphore s tokens 2\n"
            "barrier meet size 1\n"
            "actor A:\n"
            "    lock mu\n"
            "    unlock mu\n"
            "    acquire s\n"
            "    release s\n"
            "    barrier meet\n"
            "    local 2\n"
            "    fail\n"
        )
        kinds = [action.kind for action in program.actors[0]]
        assert kinds[:2] == [ActionKind.MUTEX_ASYNC_LOCK, ActionKind.MUTEX_WAIT]
        assert kinds.count(ActionKind.LOCAL_STEP) == 2
        assert kinds[-1] is ActionKind.FAIL
        assert program.objects[1].tokens == 2
        assert program.objects[2].capacity == 1

    def test_waitall(self):
        program = parse_program(
            "actors 2\nmailbox m\nactor A:\n    send m -> x\n    recv m -> y\n    waitall x y\nactor B:\n    local\n"
        )
        assert program.actors[0][2].comm_refs == (0, 1)

    def test_shipped_programs_parse(self):
        files = sorted(PROGRAMS_DIR.glob("*.rfs"))
        assert files
        for path in files:
            assert parse_file(str(path)).num_actors >= 2

    def test_tokenize_columns(self):
        lines = tokenize("actors 2\n    recv m from P2 -> b\n")
        assert [token.column for token in lines[1].tokens] == [5, 10, 12, 17, 20, 23]
        assert lines[1].indented
        assert lines[1].keyword.text == "recv"


class TestErrors:
    """Errors carry the line and column of the offending token."""

    def test_undeclared_mailbox(self):
        with pytest.raises(ProgramValidationError) as exc_info:
            parse_program("actors 1\nmailbox m\nactor P1:\n    send m\n    send q\n")
        assert exc_info.value.line == 5
        assert exc_info.value.column == 10
        assert "undeclared" in exc_info.value.message

    def test_unexpected_character(self):
        with pytest.raises(DslSyntaxError) as exc_info:
            parse_program("actors 1\nactor P1:\n    send $m\n")
        assert (exc_info.value.line, exc_info.value.column) == (3, 10)

    def test_missing_header(self):
        with pytest.raises(DslSyntaxError) as exc_info:
            parse_program("mailbox m\n")
        assert exc_info.value.line == 1
        with pytest.raises(DslSyntaxError):
            parse_program("# only a comment\n")

    def test_actor_count_mismatch(self):
        with pytest.raises(ProgramValidationError) as exc_info:
            parse_program("actors 2\nactor P1:\n    local\n")
        assert (exc_info.value.line, exc_info.value.column) == (1, 8)

    def test_statement_outside_actor(self):
        with pytest.raises(DslSyntaxError, match="outside an actor"):
            parse_program("actors 1\n    local\nactor P1:\n    local\n")

    def test_declaration_after_actor(self):
        with pytest.raises(DslSyntaxError) as exc_info:
            parse_program("actors 1\nactor P1:\n    local\nmailbox m\n")
        assert exc_info.value.line == 4

    def test_unknown_statement(self):
        with pytest.raises(DslSyntaxError, match="unknown statement 'jump'"):
            parse_program("actors 1\nactor P1:\n    jump\n")

    def test_recv_from_unknown_actor(self):
        with pytest.raises(ProgramValidationError) as exc_info:
            parse_program("actors 1\nmailbox m\nactor P1:\n    recv m from P9\n")
        assert (exc_info.value.line, exc_info.value.column) == (4, 17)

    def test_duplicate_actor(self):
        with pytest.raises(ProgramValidationError, match="declared twice"):
            parse_program("actors 2\nactor P1:\n    local\nactor P1:\n    local\n")

    def test_lock_discipline_reported_at_statement_line(self):
        with pytest.raises(ProgramValidationError) as exc_info:
            parse_program("actors 1\nmutex mu\nactor P1:\n    local\n    unlock mu\n")
        assert exc_info.value.line == 5

    def test_barrier_size(self):
        with pytest.raises(ProgramValidationError, match="positive size"):
            parse_program("actors 1\nbarrier b size 0\nactor P1:\n    local\n")

    def test_user_message_names_location(self):
        with pytest.raises(ProgramValidationError) as exc_info:
            parse_program("actors 1\nactor P1:\n    wait x\n")
        assert exc_info.value.user_message.startswith("Invalid program: line 3, column 10:")


EMIT_PROGRAMS = [
    pytest.param(mpi_any(0), id="mpi_any0"),
    pytest.param(mpi_any(2, pad=1), id="mpi_any2_pad1"),
    pytest.param(philosophers_semaphore(3), id="philosophers_semaphore3"),
    pytest.param(busy_wait(2), id="busy_wait2"),
    pytest.param(factorial_bench(3), id="factorial3"),
    pytest.param(all_faulty(2), id="all_faulty2"),
] + [pytest.param(random_program(seed), id=f"random{seed}") for seed in range(10)]


class TestEmit:
    """Emitted text parses back to the same program."""

    @pytest.mark.parametrize("program", EMIT_PROGRAMS)
    def test_parse_of_emit_is_identity(self, program):
        text = emit_program(program)
        assert parse_program(text) == program
        assert emit_program(parse_program(text)) == text

    def test_layout(self):
        text = emit_program(mpi_any(0))
        assert text.startswith("actors 3\n\nmailbox m\n\nactor P1:\n    send m\n")
        assert "    recv m from P2 -> b\n    wait b\n" in text
        assert text.endswith("\n")

    def test_folds_sugar(self):
        text = emit_program(philosophers_semaphore(2))
        assert "    acquire seats\n    lock fork0\n    lock fork1\n" in text
        assert "semaphore seats tokens 2" in text
