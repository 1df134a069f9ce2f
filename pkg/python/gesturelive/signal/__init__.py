"""
The shared DSP substrate: audio buffers, probe tones, band filters and the STFT.
"""

from gesturelive.errors import GestureLiveError


class SignalError(GestureLiveError):
    """Raised when a signal does not meet the preconditions of an operation."""

    pass


class FrequencyAliasingError(SignalError):
    """Raised when a requested frequency is at or above the Nyquist frequency."""

    pass


class InsufficientSignalError(SignalError):
    """Raised when a buffer is too short for the requested analysis."""

    pass


class SampleRateError(SignalError):
    """Raised when a sample rate cannot support the requested filter."""

    pass


class ChannelError(SignalError):
    """Raised when an operation receives the wrong number of channels."""

    pass
