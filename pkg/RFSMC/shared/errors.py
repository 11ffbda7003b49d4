"""Shared error handling infrastructure for the model checker.

Provides the exception hierarchy, user-facing error messages, CLI exit status
mapping, and Sentry integration with run_id context.
"""

import logging
import os
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

# Sentry integration (lazy loaded)
_sentry_initialized = False
try:  # pragma: no cover - optional dependency
    import sentry_sdk
except Exception:  # pragma: no cover - optional dependency
    sentry_sdk = None


EXIT_SAFE = 0
EXIT_BUG = 1
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3


def init_sentry(dsn: Optional[str] = None):
    """Initialize Sentry SDK with configuration.

    Args:
        dsn: Sentry DSN. If not provided, reads from centralized settings.
    """
    global _sentry_initialized

    if _sentry_initialized:
        return

    try:
        if sentry_sdk is None:
            logger.warning("sentry-sdk not installed, error tracking disabled")
            return

        from RFSMC.shared.settings import get_settings

        settings = get_settings()

        effective_dsn = dsn
        if not effective_dsn and settings.observability.sentry.dsn:
            effective_dsn = settings.observability.sentry.dsn.get_secret_value()
        if not effective_dsn:
            effective_dsn = os.getenv("SENTRY_DSN")

        if not effective_dsn:
            logger.debug("Sentry DSN not configured, error tracking disabled")
            return

        sentry_sdk.init(
            dsn=effective_dsn,
            traces_sample_rate=settings.observability.sentry.traces_sample_rate,
            environment=settings.observability.sentry.environment,
        )

        _sentry_initialized = True
        logger.info("Sentry error tracking initialized")

    except Exception as e:
        logger.error(f"Failed to initialize Sentry: {e}")


class RFSMCError(Exception):
    """Base exception for all model checker errors.

    All errors include:
    - run_id: Exploration run identifier
    - component: Which component raised the error
    - metadata: Additional context for debugging
    """

    def __init__(
        self,
        message: str,
        run_id: Optional[str] = None,
        component: Optional[str] = None,
        metadata: Optional[Dict[str, Any]] = None,
        user_message: Optional[str] = None,
    ):
        super().__init__(message)
        self.message = message
        self.run_id = run_id
        self.component = component
        self.metadata = metadata or {}
        self.user_message = user_message

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to dictionary for logging/serialization."""
        return {
            "error_type": self.__class__.__name__,
            "message": self.message,
            "run_id": self.run_id,
            "component": self.component,
            "metadata": self.metadata,
        }


class ProgramValidationError(RFSMCError):
    """A program is not well-formed (undeclared object, bad lock discipline, ...)."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        metadata: Optional[Dict[str, Any]] = None,
    ):
        location = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(
            message,
            component="model",
            metadata={**(metadata or {}), "line": line, "column": column},
            user_message=f"Invalid program: {location}{message}",
        )
        self.line = line
        self.column = column


class DslSyntaxError(ProgramValidationError):
    """Malformed program text."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(message, line=line, column=column)
        self.component = "dsl"
        self.user_message = f"Syntax error at line {line}, column {column}: {message}"


class ContractViolation(RFSMCError):
    """An operation was called outside its precondition."""

    def __init__(self, message: str, metadata: Optional[Dict[str, Any]] = None):
        super().__init__(message, component="model", metadata=metadata)


class ReplayError(ContractViolation):
    """An actor sequence could not be replayed from the initial state."""

    def __init__(self, message: str, index: int, metadata: Optional[Dict[str, Any]] = None):
        super().__init__(message, metadata={**(metadata or {}), "index": index})
        self.index = index
        self.user_message = f"Replay failed at step {index}: {message}"


class OptimalityViolation(RFSMCError):
    """Every enabled actor is asleep at a freshly created node."""

    def __init__(self, message: str, run_id: Optional[str] = None, metadata: Optional[Dict[str, Any]] = None):
        super().__init__(message, run_id=run_id, component="explorer", metadata=metadata)


class InternalError(RFSMCError):
    """A structural invariant of the exploration tree was broken."""

    def __init__(self, message: str, run_id: Optional[str] = None, metadata: Optional[Dict[str, Any]] = None):
        super().__init__(message, run_id=run_id, component="explorer", metadata=metadata)


class OracleBudgetExceeded(RFSMCError):
    """Brute-force enumeration would exceed its configured budget."""

    def __init__(self, message: str, budget: int):
        super().__init__(
            message,
            component="oracle",
            metadata={"budget": budget},
            user_message=f"Program too large for the brute-force oracle (budget {budget}).",
        )
        self.budget = budget


def report_error(
    error: Exception,
    run_id: Optional[str] = None,
    component: Optional[str] = None,
    extra_context: Optional[Dict[str, Any]] = None,
) -> None:
    """Report error to Sentry with structured context."""
    init_sentry()

    if not _sentry_initialized or sentry_sdk is None:
        logger.error(f"Error in {component or 'unknown'}: {error}", exc_info=error)
        return

    try:
        with sentry_sdk.push_scope() as scope:
            if run_id:
                scope.set_tag("run_id", run_id)
            elif isinstance(error, RFSMCError) and error.run_id:
                scope.set_tag("run_id", error.run_id)

            if component:
                scope.set_tag("component", component)
            elif isinstance(error, RFSMCError) and error.component:
                scope.set_tag("component", error.component)

            if extra_context:
                for key, value in extra_context.items():
                    scope.set_context(key, value)

            if isinstance(error, RFSMCError):
                scope.set_context("rfsmc_error", error.to_dict())

            sentry_sdk.capture_exception(error)

    except Exception as e:
        logger.error(f"Failed to report error to Sentry: {e}")


def format_user_error(error: Exception, include_details: bool = False) -> str:
    """Convert exception to user-facing error message (no stack traces)."""
    if isinstance(error, RFSMCError):
        if error.user_message:
            return error.user_message

        component = error.component or "checker"
        base_message = f"{component.title()} failed"
        if include_details:
            return f"{base_message}: {error.message}"
        return f"{base_message}. Re-run with --format json for details."

    if isinstance(error, FileNotFoundError):
        return f"File not found: {error.filename}"
    if isinstance(error, ValueError):
        return f"Invalid input: {str(error)}"

    if include_details:
        return f"Error ({type(error).__name__}): {str(error)}"
    return "An unexpected error occurred."


def map_to_exit_code(exc: Exception) -> int:
    """Map exception to the CLI exit status."""
    if isinstance(exc, OracleBudgetExceeded):
        return EXIT_EXHAUSTED
    # validation, usage and internal failures share one status
    return EXIT_USAGE
