"""Custom exceptions for intentgen."""

from typing import Any, Dict, Optional


class IntentGenError(Exception):
    """Base exception for intentgen."""


class ConfigurationError(IntentGenError):
    """Configuration error."""


class ValidationError(IntentGenError):
    """Validation failed."""


class UsageError(IntentGenError):
    """An operation was called with arguments it cannot accept."""


class ParseError(IntentGenError):
    """A dataset file could not be parsed."""

    def __init__(self, path: str, location: Any, reason: str):
        self.path = str(path)
        self.location = location
        self.reason = reason
        super().__init__(f"{self.path} [{location}]: {reason}")


class SizingError(IntentGenError):
    """More items were requested than are available."""

    def __init__(self, what: str, available: int, requested: int):
        self.what = what
        self.available = available
        self.requested = requested
        super().__init__(f"{what}: requested {requested}, only {available} available")


class TaskNotApplicableError(IntentGenError):
    """The task cannot be built for this corpus."""


class BackendStateError(IntentGenError):
    """Backend used before it was trained or loaded."""


class TrainingError(IntentGenError):
    """Fine-tuning failed."""

    def __init__(self, message: str, epoch: Optional[int] = None):
        self.epoch = epoch
        if epoch is not None:
            message = f"epoch {epoch}: {message}"
        super().__init__(message)


class GenerationError(IntentGenError):
    """Text generation failed."""


class UndefinedMetricError(IntentGenError):
    """A metric is undefined for the given counts."""


class StageError(IntentGenError):
    """A pipeline stage failed."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")

    def to_record(self) -> Dict[str, Any]:
        """Machine-readable error record."""
        return {
            'stage': self.stage,
            'error_type': type(self.cause).__name__,
            'message': str(self.cause),
        }
