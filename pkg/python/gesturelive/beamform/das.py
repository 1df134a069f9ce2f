"""
Contain the frequency-domain delay-and-sum beamformer.

Each channel is advanced by its arrival delay with a linear phase ramp, which is exact
for fractional delays, then the channels are averaged. Channels are zero-padded before
the transform so the shift does not wrap around the buffer ends.
"""

# Python imports
from typing import Tuple
import math

# 3rd party imports
import numpy as np
import numpy.typing as npt
from scipy import fft as spfft

# Our imports
from gesturelive.beamform import GeometryError
from gesturelive.beamform.geometry import ArrayGeometry, SteeringDirection, tdoa
from gesturelive.signal.audio import AudioBuffer

DEFAULT_SEARCH_STEP_DEG = 5.0


def _padded_size(length: int, geometry: ArrayGeometry, sample_rate: float) -> int:
    relative = geometry.mic_positions - geometry.mic_positions[0]
    extent = float(np.max(np.linalg.norm(relative, axis=1)))
    guard = int(math.ceil(extent / geometry.speed_of_sound * sample_rate)) + 1
    return spfft.next_fast_len(length + 2 * guard, real=True)


def _check_channels(channels: AudioBuffer, geometry: ArrayGeometry):
    if channels.channel_count != geometry.mic_count:
        raise GeometryError(
            f"Recording has {channels.channel_count} channels but the geometry has "
            f"{geometry.mic_count} microphones."
        )


def _steered_spectrum(
    spectra: npt.NDArray[np.complex128],
    freqs: npt.NDArray[np.float64],
    delays: npt.NDArray[np.float64],
) -> npt.NDArray[np.complex128]:
    phases = np.exp(2j * np.pi * delays[:, np.newaxis] * freqs[np.newaxis, :])
    return np.mean(spectra * phases, axis=0)


def delay_and_sum(
    channels: AudioBuffer, geometry: ArrayGeometry, direction: SteeringDirection
) -> AudioBuffer:
    """
    Steer an array recording toward a direction and return the mono beam.

    :param channels: One channel per microphone of the geometry, in the same order.
    :param geometry: The array geometry.
    :param direction: The direction to steer to.

    :returns The beamformed buffer, as long as the input.

    :raises GeometryError if the channel count does not match the geometry.
    """
    _check_channels(channels, geometry)
    sample_rate = float(channels.sample_rate)
    size = _padded_size(channels.length, geometry, sample_rate)
    spectra = spfft.rfft(channels.samples, n=size, axis=1)
    freqs = spfft.rfftfreq(size, d=1.0 / sample_rate)
    beam = spfft.irfft(_steered_spectrum(spectra, freqs, tdoa(geometry, direction)), n=size)
    return AudioBuffer.mono(beam[: channels.length], sample_rate)


def steer_search(
    channels: AudioBuffer,
    geometry: ArrayGeometry,
    step_deg: float = DEFAULT_SEARCH_STEP_DEG,
    elevation: float = 0.0,
) -> Tuple[SteeringDirection, float]:
    """
    Find the azimuth whose beam carries the most power on a regular grid.

    :param channels: The array recording.
    :param geometry: The array geometry.
    :param step_deg: The grid spacing in degrees.
    :param elevation: The fixed elevation of every candidate.

    :returns A tuple of the best direction and its beam power.
    """
    _check_channels(channels, geometry)
    if step_deg <= 0:
        raise GeometryError(f"Search step must be positive, got {step_deg}.")
    sample_rate = float(channels.sample_rate)
    size = _padded_size(channels.length, geometry, sample_rate)
    spectra = spfft.rfft(channels.samples, n=size, axis=1)
    freqs = spfft.rfftfreq(size, d=1.0 / sample_rate)
    best, best_power = SteeringDirection(0.0, elevation), -1.0
    for azimuth in np.arange(0.0, 360.0, step_deg):
        direction = SteeringDirection(float(azimuth), elevation)
        beam = _steered_spectrum(spectra, freqs, tdoa(geometry, direction))
        power = float(np.sum(np.abs(beam) ** 2))
        if power > best_power:
            best, best_power = direction, power
    return best, best_power
