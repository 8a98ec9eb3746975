"""Exception hierarchy for the decoding pipeline.

Every class carries the CLI exit code it maps to.
"""

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class S3TError(Exception):
    """Base class for all pipeline errors."""

    exit_code = EXIT_FAILURE


class DimensionError(S3TError, ValueError):
    """Operand shapes do not agree."""

    exit_code = EXIT_DATA


class ConfigurationError(S3TError, ValueError):
    """A hyperparameter or structural setting is invalid."""

    exit_code = EXIT_USAGE


class NumericError(S3TError, ArithmeticError):
    """A computation produced or received non-finite or non-definite values."""

    exit_code = EXIT_NUMERIC


class GradientUsageError(S3TError, ValueError):
    """Reverse-mode differentiation was requested on an unsuitable tensor."""

    exit_code = EXIT_NUMERIC


class TrainingError(S3TError, RuntimeError):
    """The optimizer or training loop cannot proceed."""

    exit_code = EXIT_NUMERIC


class DataError(S3TError, ValueError):
    """Trial data does not satisfy an operation's preconditions."""

    exit_code = EXIT_DATA


class SegmentationError(DataError):
    """Epoching windows are empty or fall outside the recording."""

    def __init__(self, message: str, events: list[tuple[int, int]] | None = None):
        super().__init__(message)
        self.events = events or []


class DegenerateChannelError(DataError):
    """A channel is flat across the training data."""

    def __init__(self, message: str, channels: list[int] | None = None):
        super().__init__(message)
        self.channels = channels or []


class FormatError(S3TError, ValueError):
    """A file has the wrong magic string or version."""

    exit_code = EXIT_DATA


class CorruptionError(FormatError):
    """A file payload is truncated or has trailing bytes."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
