"""
Contain the Butterworth filters that separate the voice band from the probe band.

Both filters run forward and backward (`sosfiltfilt`), so they have zero phase and the
squared magnitude of the single-pass design. The probe band-pass is designed so that
the two passes together are 3 dB down at exactly 19.8 and 20.2 kHz.
"""

# Python imports
from functools import cache
from typing import Tuple
import math

# 3rd party imports
import numpy as np
import numpy.typing as npt
from scipy import signal as sps

# Our imports
from gesturelive.signal import SampleRateError
from gesturelive.signal.audio import AudioBuffer

PROBE_BAND_HZ = (19800.0, 20200.0)
PROBE_FILTER_ORDER = 4
VOICE_CUTOFF_HZ = 10000.0
VOICE_FILTER_ORDER = 8
MIN_SPLIT_SAMPLE_RATE = 44100.0

SosMatrix = npt.NDArray[np.float64]


def _forward_backward_band_edges(
    low_hz: float, high_hz: float, sample_rate: float, order: int
) -> Tuple[float, float]:
    # A forward-backward pass squares the magnitude response, so the single-pass
    # design must be 1.5 dB down at the requested edges. In the prewarped analog
    # domain that means widening the bandwidth around the same geometric center.
    low_w = math.tan(math.pi * low_hz / sample_rate)
    high_w = math.tan(math.pi * high_hz / sample_rate)
    center_sq = low_w * high_w
    ratio = (math.sqrt(2.0) - 1.0) ** (1.0 / (2 * order))
    bandwidth = (high_w - low_w) / ratio
    design_low = (-bandwidth + math.sqrt(bandwidth**2 + 4 * center_sq)) / 2
    design_high = design_low + bandwidth
    return (
        sample_rate * math.atan(design_low) / math.pi,
        sample_rate * math.atan(design_high) / math.pi,
    )


def _forward_backward_cutoff(cutoff_hz: float, sample_rate: float, order: int) -> float:
    warped = math.tan(math.pi * cutoff_hz / sample_rate)
    ratio = (math.sqrt(2.0) - 1.0) ** (1.0 / (2 * order))
    return sample_rate * math.atan(warped / ratio) / math.pi


@cache
def probe_bandpass_sos(
    sample_rate: float,
    low_hz: float = PROBE_BAND_HZ[0],
    high_hz: float = PROBE_BAND_HZ[1],
    order: int = PROBE_FILTER_ORDER,
) -> SosMatrix:
    """
    Design the probe band-pass filter as second-order sections.

    :param sample_rate: The sample rate in Hz.
    :param low_hz: The lower -3 dB point of the forward-backward response.
    :param high_hz: The upper -3 dB point of the forward-backward response.
    :param order: The Butterworth order of a single pass.

    :returns The second-order sections of a single pass.

    :raises SampleRateError if the upper edge is not below the Nyquist frequency.
    """
    if sample_rate <= 2 * high_hz:
        raise SampleRateError(
            f"The probe band-pass needs a sample rate above {2 * high_hz} Hz, got "
            f"{sample_rate} Hz."
        )
    design_low, design_high = _forward_backward_band_edges(
        low_hz, high_hz, sample_rate, order
    )
    sos = sps.butter(
        order, [design_low, design_high], btype="bandpass", fs=sample_rate, output="sos"
    )
    return np.asarray(sos, dtype=np.float64)


@cache
def voice_lowpass_sos(
    sample_rate: float,
    cutoff_hz: float = VOICE_CUTOFF_HZ,
    order: int = VOICE_FILTER_ORDER,
) -> SosMatrix:
    """Design the voice-band low-pass filter as second-order sections."""
    if sample_rate <= 2 * cutoff_hz:
        raise SampleRateError(
            f"The voice low-pass needs a sample rate above {2 * cutoff_hz} Hz, got "
            f"{sample_rate} Hz."
        )
    design_cutoff = _forward_backward_cutoff(cutoff_hz, sample_rate, order)
    sos = sps.butter(order, design_cutoff, btype="lowpass", fs=sample_rate, output="sos")
    return np.asarray(sos, dtype=np.float64)


def _filter(buffer: AudioBuffer, sos: SosMatrix) -> AudioBuffer:
    data = buffer.data()
    if data.size == 0:
        return buffer
    # sosfiltfilt pads by a few filter lengths and refuses shorter inputs.
    padlen = min(3 * (2 * sos.shape[0] + 1), data.size - 1)
    return buffer.with_samples(sps.sosfiltfilt(sos, data, padlen=padlen))


def bandpass_probe(buffer: AudioBuffer) -> AudioBuffer:
    """
    Keep only the 19.8-20.2 kHz probe band with a zero-phase Butterworth band-pass.

    :param buffer: A single-channel buffer whose Nyquist frequency exceeds 20.2 kHz.

    :returns The filtered buffer, same length as the input.

    :raises SampleRateError if the sample rate is 40.4 kHz or less.
    """
    buffer.require_mono()
    return _filter(buffer, probe_bandpass_sos(float(buffer.sample_rate)))


def lowpass_voice(buffer: AudioBuffer) -> AudioBuffer:
    """Keep only the voice band below 10 kHz with a zero-phase Butterworth low-pass."""
    buffer.require_mono()
    return _filter(buffer, voice_lowpass_sos(float(buffer.sample_rate)))


def split_bands(buffer: AudioBuffer) -> Tuple[AudioBuffer, AudioBuffer]:
    """
    Separate a recording into its voice band and its probe band.

    :param buffer: A single-channel buffer sampled at 44.1 kHz or more.

    :returns A tuple of (voice, probe) buffers, both as long as the input.

    :raises SampleRateError if the sample rate is below 44.1 kHz.
    """
    buffer.require_mono()
    if buffer.sample_rate < MIN_SPLIT_SAMPLE_RATE:
        raise SampleRateError(
            f"Band splitting needs at least {MIN_SPLIT_SAMPLE_RATE} Hz, got "
            f"{buffer.sample_rate} Hz."
        )
    return lowpass_voice(buffer), bandpass_probe(buffer)
