"""
Delay-and-sum beamforming over a circular microphone array.
"""

from gesturelive.errors import GestureLiveError


class GeometryError(GestureLiveError):
    """Raised when an array geometry is invalid or does not match the recording."""

    pass
