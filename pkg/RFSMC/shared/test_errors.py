"""Tests for shared error handling module."""

from unittest.mock import MagicMock, patch

import pytest

from RFSMC.shared import errors
from RFSMC.shared.errors import (
    EXIT_EXHAUSTED,
    EXIT_USAGE,
    ContractViolation,
    DslSyntaxError,
    InternalError,
    OptimalityViolation,
    OracleBudgetExceeded,
    ProgramValidationError,
    ReplayError,
    RFSMCError,
    format_user_error,
    map_to_exit_code,
    report_error,
)


class TestCustomExceptions:
    """Test custom exception classes"""

    def test_base_error_fields(self):
        exc = RFSMCError("boom", run_id="run-1", component="explorer", metadata={"k": 1})
        assert str(exc) == "boom"
        assert exc.to_dict() == {
            "error_type": "RFSMCError",
            "message": "boom",
            "run_id": "run-1",
            "component": "explorer",
            "metadata": {"k": 1},
        }

    def test_validation_error_location(self):
        exc = ProgramValidationError("undeclared mailbox 'q'", line=5, column=10)
        assert exc.metadata["line"] == 5
        assert exc.metadata["column"] == 10
        assert exc.user_message == "Invalid program: line 5, column 10: undeclared mailbox 'q'"

    def test_validation_error_without_location(self):
        exc = ProgramValidationError("actor names must be unique")
        assert exc.user_message == "Invalid program: actor names must be unique"

    def test_syntax_error_is_validation_error(self):
        exc = DslSyntaxError("unknown keyword 'x'", 3)
        assert isinstance(exc, ProgramValidationError)
        assert exc.component == "dsl"
        assert exc.column == 1
        assert exc.user_message == "Syntax error at line 3, column 1: unknown keyword 'x'"

    def test_replay_error_index(self):
        exc = ReplayError("actor P1 is not enabled", index=4)
        assert isinstance(exc, ContractViolation)
        assert exc.index == 4
        assert exc.metadata["index"] == 4

    def test_explorer_errors(self):
        assert OptimalityViolation("all asleep", run_id="r").component == "explorer"
        assert InternalError("bad tree").run_id is None

    def test_oracle_budget(self):
        exc = OracleBudgetExceeded("too many executions", budget=100)
        assert exc.budget == 100
        assert "budget 100" in exc.user_message


class TestUserFriendlyMessages:
    """Test user-facing error message generation"""

    def test_user_message_preferred(self):
        exc = ProgramValidationError("bad", line=1, column=2)
        assert format_user_error(exc) == exc.user_message

    def test_checker_error_without_user_message(self):
        exc = InternalError("wut node missing")
        assert format_user_error(exc) == "Explorer failed. Re-run with --format json for details."
        assert format_user_error(exc, include_details=True) == "Explorer failed: wut node missing"

    def test_file_not_found(self):
        exc = FileNotFoundError(2, "No such file", "missing.rfs")
        assert format_user_error(exc) == "File not found: missing.rfs"

    def test_value_error(self):
        assert format_user_error(ValueError("unknown strategy 'bfs'")) == "Invalid input: unknown strategy 'bfs'"

    def test_generic_error_hides_internals(self):
        message = format_user_error(RuntimeError("Something broke internally"))
        assert "unexpected error" in message.lower()
        assert "Something broke internally" not in message


class TestExitCodes:
    @pytest.mark.parametrize(
        "exc,code",
        [
            (OracleBudgetExceeded("big", budget=1), EXIT_EXHAUSTED),
            (ProgramValidationError("bad"), EXIT_USAGE),
            (ValueError("bad"), EXIT_USAGE),
            (InternalError("bad"), EXIT_USAGE),
        ],
    )
    def test_map_to_exit_code(self, exc, code):
        assert map_to_exit_code(exc) == code


class TestReportError:
    """Test error reporting with and without Sentry"""

    def test_logs_when_sentry_disabled(self):
        with patch.object(errors, "init_sentry"), patch.object(errors, "_sentry_initialized", False), \
                patch.object(errors, "logger") as mock_logger:
            report_error(ValueError("bad"), component="cli")
        mock_logger.error.assert_called_once()
        assert "cli" in mock_logger.error.call_args[0][0]

    def test_captures_with_sentry(self, mocker):
        fake_sentry = MagicMock()
        scope = fake_sentry.push_scope.return_value.__enter__.return_value
        exc = InternalError("bad tree", run_id="run-7")
        mocker.patch.object(errors, "init_sentry")
        mocker.patch.object(errors, "_sentry_initialized", True)
        mocker.patch.object(errors, "sentry_sdk", fake_sentry)
        report_error(exc)
        scope.set_tag.assert_any_call("run_id", "run-7")
        scope.set_tag.assert_any_call("component", "explorer")
        scope.set_context.assert_called_with("rfsmc_error", exc.to_dict())
        fake_sentry.capture_exception.assert_called_once_with(exc)
