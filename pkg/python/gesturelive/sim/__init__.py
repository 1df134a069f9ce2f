"""
Physics-based generator of live-speaker and loudspeaker-replay recordings.
"""

from gesturelive.errors import GestureLiveError


class SimulationError(GestureLiveError):
    """Raised when a reflector or scene description is physically invalid."""

    pass
