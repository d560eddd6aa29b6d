import json
import logging
from typing import Any, Dict, Optional

from pydantic import ValidationError as PydanticValidationError

logger = logging.getLogger(__name__)


class ErrorCodes:
    """Process exit codes shared by every CLI command."""
    OK = 0
    NUMERICAL_FAILURE = 1
    PARSE_ERROR = 2
    DIMENSION_ERROR = 3


class FluctumError(Exception):
    """Base class for all errors raised by fluctum."""

    error_code: int = ErrorCodes.NUMERICAL_FAILURE

    def __init__(self, message: str, error_code: Optional[int] = None, data: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        if error_code is not None:
            self.error_code = error_code
        self.data = data or {}

    def __str__(self) -> str:
        return f"{type(self).__name__}({self.error_code}): {super().__str__()}"


class InvalidInputError(FluctumError, ValueError):
    """An operand failed validation (non-Hermitian, non-unitary, not a distribution...)."""


class DimensionMismatchError(FluctumError, ValueError):
    error_code = ErrorCodes.DIMENSION_ERROR


class InvalidParameterError(FluctumError, ValueError):
    """A scalar parameter is outside its admissible range."""


class NotPositiveError(InvalidInputError):
    pass


class ConstraintViolationError(InvalidInputError):
    pass


class DegenerateSpectrumError(InvalidInputError):
    pass


class UndefinedQuantityError(InvalidParameterError):
    pass


class ConvergenceError(FluctumError, ArithmeticError):
    pass


class ScenarioError(FluctumError):
    error_code = ErrorCodes.PARSE_ERROR


class ErrorHandler:
    """Centralized mapping of exceptions to exit codes and failure records"""

    @staticmethod
    def exit_code_for(error: BaseException) -> int:
        if isinstance(error, FluctumError):
            return error.error_code
        if isinstance(error, (PydanticValidationError, json.JSONDecodeError)):
            return ErrorCodes.PARSE_ERROR
        return ErrorCodes.NUMERICAL_FAILURE

    @staticmethod
    def log_and_format_error(error: BaseException, context: str) -> Dict[str, Any]:
        """
        Log an error and format it as a failure record

        Args:
            error: The exception that occurred
            context: Where the error occurred (command, channel id...)

        Returns:
            Failure dictionary suitable for one JSON line on stderr
        """
        error_msg = f"{context}: {error}"
        logger.error(error_msg, exc_info=not isinstance(error, FluctumError))
        return {
            "code": ErrorHandler.exit_code_for(error),
            "kind": "error",
            "context": context,
            "message": str(error),
            "error_type": type(error).__name__,
        }

    @staticmethod
    def format_failure(kind: str, channel_id: str, message: str, **data: Any) -> Dict[str, Any]:
        """Format a failed verification (residual, bound or Jensen check)"""
        return {
            "code": ErrorCodes.NUMERICAL_FAILURE,
            "kind": kind,
            "channel_id": channel_id,
            "message": message,
            "data": data,
        }
