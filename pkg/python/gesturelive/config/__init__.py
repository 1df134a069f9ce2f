"""
Run configuration: defaults, TOML files and command-line overrides.
"""

from gesturelive.errors import GestureLiveError


class ConfigError(GestureLiveError):
    """Raised when a configuration file or value is invalid."""

    pass
