"""
Contain the root exception type of the package.

Each sub-package defines its own, narrower exceptions next to the code that raises
them. They all derive from `GestureLiveError` so that the command-line entrypoint can
turn any of them into the documented exit codes without catching unrelated bugs.
"""


class GestureLiveError(RuntimeError):
    """Base class for every error raised on purpose by this package."""

    pass
