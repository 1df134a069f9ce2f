"""
A module which provides the logging configuration we use.

All loggers and handlers of the package are defined here. Log records go to stderr
through a single console handler so that stdout stays free for the machine-readable
output of the command-line tools (verdict lines, summaries, the EER line).

The level is taken from the environment, see `get_logging_env_vars`.
"""

# Python imports
from typing import Any, Dict, Tuple
import logging
import os

LOG_LEVEL_ENV_VAR = "GESTURELIVE__LOGGING__LOG_LEVEL"
LOG_FORMAT_ENV_VAR = "GESTURELIVE__LOGGING__LOG_FORMAT"

_TEXT_FORMAT = "[%(asctime)s] {%(name)s} %(levelname)s - %(message)s"
_BRIEF_FORMAT = "%(levelname)s - %(message)s"


def get_logging_env_vars() -> Tuple[str, str]:
    """
    Retrieve the environment variables used to configure logging.

    - GESTURELIVE__LOGGING__LOG_LEVEL: The level of logging, e.g. INFO (the default).
    - GESTURELIVE__LOGGING__LOG_FORMAT: Either "text" (the default), which carries
      timestamps and logger names, or "brief".

    :returns A tuple of (log_level, log_format).
    """
    log_level = os.environ.get(LOG_LEVEL_ENV_VAR, logging.getLevelName(logging.INFO))
    log_format = os.environ.get(LOG_FORMAT_ENV_VAR, "text").lower()
    return log_level.upper(), log_format


def _build_logging_config() -> Dict[str, Any]:
    log_level, log_format = get_logging_env_vars()
    # logging.getLevelNamesMapping() is Python 3.11+; it returns a copy of _nameToLevel.
    level_names = getattr(logging, "getLevelNamesMapping", lambda: dict(logging._nameToLevel))()
    if log_level not in level_names:
        log_level = logging.getLevelName(logging.INFO)
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "gesturelive": {
                "format": _BRIEF_FORMAT if log_format == "brief" else _TEXT_FORMAT,
            },
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "formatter": "gesturelive",
                "stream": "ext://sys.stderr",
            },
        },
        "loggers": {
            "gesturelive": {
                "handlers": ["console"],
                "level": log_level,
                "propagate": False,
            },
        },
        "root": {
            "handlers": ["console"],
            "level": logging.getLevelName(logging.WARNING),
        },
    }


LOGGING_CONFIG = _build_logging_config()
