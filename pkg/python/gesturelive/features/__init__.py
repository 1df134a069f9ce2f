"""
Per-phoneme Doppler slices around the probe frequency and the 11 contour features.
"""

from gesturelive.errors import GestureLiveError


class FeatureError(GestureLiveError):
    """Base class for feature extraction errors."""

    pass


class DegenerateInputError(FeatureError):
    """Raised when a slice carries no usable energy (all-zero or constant)."""

    pass


class ContourError(FeatureError):
    """Raised when slices or contours do not meet an operation's preconditions."""

    pass
