"""
Contains functions for retrieving the environment variables the tools honor.

Logging is configured from the environment too; its variables are documented next to
the logging configuration in `gesturelive.logging.config`.
"""

# Python imports
from pathlib import Path
import os

CONFIG_PATH_ENV_VAR = "GESTURELIVE__CORE__CONFIG_PATH"


def get_environ_config_path() -> Path | None:
    """
    Retrieve the configuration file named by the environment, if any.

    The file is used when no `--config` flag is given on the command line.
    """
    value = os.environ.get(CONFIG_PATH_ENV_VAR, "").strip()
    return Path(value) if value else None
