"""Render a far-field source across a microphone array."""

# Python imports
import math

# 3rd party imports
import numpy as np
from scipy import fft as spfft

# Our imports
from gesturelive.beamform.geometry import ArrayGeometry, SteeringDirection, tdoa
from gesturelive.signal.audio import AudioBuffer


def render_plane_wave(
    source: AudioBuffer, geometry: ArrayGeometry, direction: SteeringDirection
) -> AudioBuffer:
    """
    Render a plane wave arriving from a direction at every microphone of an array.

    Channel m receives the source delayed by its arrival delay, applied as a phase ramp
    so fractional delays are exact; channel 0 receives the source unchanged.

    :param source: The single-channel source signal as heard at channel 0.
    :param geometry: The array geometry.
    :param direction: The arrival direction.

    :returns One channel per microphone, as long as the source.
    """
    data = source.data()
    sample_rate = float(source.sample_rate)
    delays = tdoa(geometry, direction)
    guard = int(math.ceil(float(np.max(np.abs(delays))) * sample_rate)) + 1
    size = spfft.next_fast_len(data.size + 2 * guard, real=True)
    spectrum = spfft.rfft(data, n=size)
    freqs = spfft.rfftfreq(size, d=1.0 / sample_rate)
    phases = np.exp(-2j * np.pi * delays[:, np.newaxis] * freqs[np.newaxis, :])
    channels = spfft.irfft(spectrum[np.newaxis, :] * phases, n=size, axis=1)
    return AudioBuffer(channels[:, : data.size], sample_rate)
