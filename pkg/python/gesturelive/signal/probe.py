"""Generate the inaudible probe tone the device speaker emits."""

# 3rd party imports
import numpy as np

# Our imports
from gesturelive.signal import FrequencyAliasingError, SignalError
from gesturelive.signal.audio import AudioBuffer

DEFAULT_PROBE_F0_HZ = 20000.0


def generate_probe(
    sample_rate: float,
    f0: float = DEFAULT_PROBE_F0_HZ,
    duration: float = 1.0,
    amplitude: float = 1.0,
) -> AudioBuffer:
    """
    Generate a single-channel pure sinusoid at f0 with zero phase at sample 0.

    The buffer holds round(duration * sample_rate) samples and sample k equals
    amplitude * sin(2*pi*f0*k/sample_rate).

    :param sample_rate: The sample rate in Hz.
    :param f0: The probe frequency in Hz.
    :param duration: The duration in seconds; zero yields an empty buffer.
    :param amplitude: The peak amplitude in [0, 1].

    :returns The probe buffer.

    :raises FrequencyAliasingError if f0 is at or above the Nyquist frequency.
    """
    if f0 >= sample_rate / 2:
        raise FrequencyAliasingError(
            f"Probe frequency {f0} Hz aliases at sample rate {sample_rate} Hz; it must "
            f"stay below the Nyquist frequency of {sample_rate / 2} Hz."
        )
    if duration < 0:
        raise SignalError(f"Duration must be non-negative, got {duration}.")
    if not 0 <= amplitude <= 1:
        raise SignalError(f"Amplitude must lie in [0, 1], got {amplitude}.")
    count = int(round(duration * sample_rate))
    k = np.arange(count, dtype=np.float64)
    return AudioBuffer.mono(amplitude * np.sin(2 * np.pi * f0 * k / sample_rate), sample_rate)
