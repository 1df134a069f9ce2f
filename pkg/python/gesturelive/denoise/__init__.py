"""
Wavelet-based denoising of contour features.
"""

from gesturelive.errors import GestureLiveError


class WaveletLengthError(GestureLiveError):
    """Raised when a sequence is too short for the requested number of levels."""

    pass


class ThresholdError(GestureLiveError):
    """Raised for a threshold multiplier outside its valid range."""

    pass
