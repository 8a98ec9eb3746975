"""Process-wide logging facade.

Call sites use the static ``Logger.print_*`` helpers; records are routed through the
standard ``logging`` machinery under the ``s3t_decoder`` logger and written to stderr so
that stdout stays reserved for tables and counts.
"""

import logging
import sys

LOGGER_NAME = "s3t_decoder"
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(message)s"


def _build_logger() -> logging.Logger:
    logger = logging.getLogger(LOGGER_NAME)
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        logger.propagate = False
    return logger


class Logger:
    """Static logging helpers shared by every module."""

    _logger = _build_logger()

    @classmethod
    def configure(cls, level: int | str = logging.INFO) -> None:
        """Set the verbosity of the package logger.

        Args:
            level: A ``logging`` level number or name such as ``"DEBUG"``.
        """
        if isinstance(level, str):
            level = logging.getLevelName(level.upper())
        cls._logger.setLevel(level)

    @classmethod
    def print_debug(cls, message: str) -> None:
        cls._logger.debug(message)

    @classmethod
    def print_info(cls, message: str) -> None:
        cls._logger.info(message)

    @classmethod
    def print_warning(cls, message: str) -> None:
        cls._logger.warning(message)

    @classmethod
    def print_error(cls, message: str) -> None:
        cls._logger.error(message)
