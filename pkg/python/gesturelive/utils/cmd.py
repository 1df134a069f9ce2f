"""A module containing the exit codes of the command-line tools and how to abort."""

# Python imports
import logging
import sys
from typing import NoReturn

logger = logging.getLogger(__name__)

# `verify` reports its verdict through the exit code too.
EXIT_OK = 0
EXIT_ATTACK = 1
EXIT_ERROR = 2
EXIT_ENROLLMENT = 3


def abort(err_msg: str, exit_code: int = EXIT_ERROR) -> NoReturn:
    """
    Log an error message and then exit the process with the given exit code.

    :param err_msg: The error message to log before exiting.
    :param exit_code: The exit code.
    """
    logger.error(err_msg)
    sys.exit(exit_code)
