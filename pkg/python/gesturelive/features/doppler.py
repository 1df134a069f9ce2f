"""
Contain the `DopplerSlice` type and its extraction and normalization.

A slice holds the probe-band magnitudes of the STFT frames whose window center lies
inside one phoneme. Its bins span f0 - 200 Hz to f0 + 200 Hz; the bins within the
carrier exclusion width of f0 carry the direct-path tone and are held at zero so that
the static carrier cannot dominate every band.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass, replace
from typing import List
import logging

# 3rd party imports
import numpy as np
import numpy.typing as npt
from scipy.interpolate import interp1d

# Our imports
from gesturelive.features import ContourError, DegenerateInputError
from gesturelive.segmentation.utterance import SegmentedUtterance
from gesturelive.signal.probe import DEFAULT_PROBE_F0_HZ
from gesturelive.signal.stft import Spectrogram

logger = logging.getLogger(__name__)

DOPPLER_HALF_BAND_HZ = 200.0
DEFAULT_CARRIER_EXCLUSION_HZ = 2.0


@dataclass(frozen=True)
class DopplerSlice:
    """
    The probe-band magnitudes of one phoneme, indexed [frame][bin].

    Bin b sits at offset_origin_hz + b * bin_width_hz relative to f0.
    """

    magnitudes: npt.NDArray[np.float64]
    f0: float
    bin_width_hz: float
    offset_origin_hz: float
    phoneme_label: str
    normalized_energy: bool = False
    normalized_length: bool = False
    carrier_exclusion_hz: float = DEFAULT_CARRIER_EXCLUSION_HZ

    def __post_init__(self):
        """Freeze the magnitude matrix."""
        magnitudes = np.array(self.magnitudes, dtype=np.float64)
        if magnitudes.ndim != 2:
            raise ContourError(
                f"Slice magnitudes must be a (frames, bins) matrix, got shape "
                f"{magnitudes.shape}."
            )
        magnitudes.flags.writeable = False
        object.__setattr__(self, "magnitudes", magnitudes)

    @property
    def frame_count(self) -> int:
        """Return the number of frames."""
        return int(self.magnitudes.shape[0])

    @property
    def bin_count(self) -> int:
        """Return the number of bins."""
        return int(self.magnitudes.shape[1])

    def offsets_hz(self) -> npt.NDArray[np.float64]:
        """Return the frequency offset of every bin relative to f0."""
        return self.offset_origin_hz + self.bin_width_hz * np.arange(self.bin_count)

    def carrier_mask(self) -> npt.NDArray[np.bool_]:
        """Return True for the bins excluded as carrier; none when the width is 0."""
        if self.carrier_exclusion_hz <= 0:
            return np.zeros(self.bin_count, dtype=bool)
        return np.abs(self.offsets_hz()) <= self.carrier_exclusion_hz + 1e-9


def extract_doppler(
    spectrogram: Spectrogram,
    utterance: SegmentedUtterance,
    f0: float = DEFAULT_PROBE_F0_HZ,
    carrier_exclusion_hz: float = DEFAULT_CARRIER_EXCLUSION_HZ,
) -> List[DopplerSlice]:
    """
    Cut the probe band of a spectrogram into one slice per phoneme.

    A frame belongs to a phoneme if and only if its window center lies in the
    phoneme's [start, end) interval. Frames whose centers fall in pauses or gaps are
    discarded. A phoneme holding no frame center is dropped with a warning.

    :param spectrogram: The STFT of the probe band; it must cover f0 +/- 200 Hz.
    :param utterance: The pause-free phoneme segmentation.
    :param f0: The probe frequency in Hz.
    :param carrier_exclusion_hz: Bins within this distance of f0 are zeroed; 0 keeps
      them.

    :returns The slices in utterance order.

    :raises ContourError if the spectrogram does not cover the Doppler band or the
      utterance has no segments.
    """
    if len(utterance) == 0:
        raise ContourError("Cannot extract Doppler slices from an empty utterance.")
    freqs = spectrogram.bin_frequencies_hz()
    tolerance = 1e-6 * spectrogram.bin_width_hz
    low, high = f0 - DOPPLER_HALF_BAND_HZ, f0 + DOPPLER_HALF_BAND_HZ
    if freqs.size == 0 or freqs[0] > low + tolerance or freqs[-1] < high - tolerance:
        raise ContourError(
            f"Spectrogram covering [{freqs[0] if freqs.size else 'n/a'}, "
            f"{freqs[-1] if freqs.size else 'n/a'}] Hz does not contain the Doppler "
            f"band [{low}, {high}] Hz."
        )
    band = np.flatnonzero((freqs >= low - tolerance) & (freqs <= high + tolerance))
    offset_origin = float(freqs[band[0]] - f0)
    magnitudes = np.abs(spectrogram.frames[:, band])
    centers = spectrogram.frame_centers_s()

    slices: List[DopplerSlice] = []
    for segment in utterance.segments:
        in_segment = (centers >= segment.start_s) & (centers < segment.end_s)
        if not in_segment.any():
            logger.warning(
                f"Phoneme '{segment.label}' [{segment.start_s:.3f}, {segment.end_s:.3f}) "
                "holds no frame center; its slice is dropped."
            )
            continue
        doppler = DopplerSlice(
            magnitudes=magnitudes[in_segment],
            f0=f0,
            bin_width_hz=spectrogram.bin_width_hz,
            offset_origin_hz=offset_origin,
            phoneme_label=segment.label,
            carrier_exclusion_hz=carrier_exclusion_hz,
        )
        slices.append(_zero_carrier(doppler))
    return slices


def _zero_carrier(doppler: DopplerSlice) -> DopplerSlice:
    mask = doppler.carrier_mask()
    if not mask.any():
        return doppler
    magnitudes = doppler.magnitudes.copy()
    magnitudes[:, mask] = 0.0
    return replace(doppler, magnitudes=magnitudes)


def normalize_energy(doppler: DopplerSlice) -> DopplerSlice:
    """
    Map the slice magnitudes affinely onto [0, 1].

    The minimum and maximum are taken over the bins outside the carrier exclusion;
    excluded bins stay at 0.

    :param doppler: The slice.

    :returns The normalized slice.

    :raises DegenerateInputError if the slice is all-zero or constant.
    """
    excluded = doppler.carrier_mask()
    included = doppler.magnitudes[:, ~excluded]
    if included.size == 0 or not np.any(included):
        raise DegenerateInputError(
            f"Slice '{doppler.phoneme_label}' has no nonzero magnitude to normalize."
        )
    low, high = float(included.min()), float(included.max())
    if high == low:
        raise DegenerateInputError(
            f"Slice '{doppler.phoneme_label}' is constant at {low}; energy "
            "normalization is undefined."
        )
    magnitudes = (doppler.magnitudes - low) / (high - low)
    magnitudes[:, excluded] = 0.0
    return replace(doppler, magnitudes=magnitudes, normalized_energy=True)


def resample_frames(
    values: npt.NDArray[np.float64], target_frames: int
) -> npt.NDArray[np.float64]:
    """
    Linearly resample a matrix along its first axis to the given number of rows.

    Both endpoints are preserved. Equal lengths return an unmodified copy.

    :raises ContourError if either length is below 2.
    """
    frames = int(values.shape[0])
    if frames < 2 or target_frames < 2:
        raise ContourError(
            f"Length normalization needs at least 2 frames on both sides, got "
            f"{frames} -> {target_frames}."
        )
    if frames == target_frames:
        return np.array(values, dtype=np.float64)
    interpolator = interp1d(np.arange(frames, dtype=np.float64), values, axis=0)
    return np.asarray(
        interpolator(np.linspace(0.0, frames - 1.0, target_frames)), dtype=np.float64
    )


def normalize_length(doppler: DopplerSlice, target_frames: int) -> DopplerSlice:
    """
    Resample a slice to exactly target_frames frames by per-bin linear interpolation.

    :raises ContourError if the slice or the target has fewer than 2 frames.
    """
    magnitudes = resample_frames(doppler.magnitudes, target_frames)
    return replace(doppler, magnitudes=magnitudes, normalized_length=True)


def dominant_offsets(doppler: DopplerSlice) -> npt.NDArray[np.float64]:
    """
    Return the offset of the strongest bin of every frame, in Hz relative to f0.

    Frames with no energy report 0 Hz.
    """
    offsets = doppler.offsets_hz()
    magnitudes = np.where(doppler.carrier_mask(), 0.0, doppler.magnitudes)
    peaks = offsets[np.argmax(magnitudes, axis=1)]
    return np.where(magnitudes.max(axis=1) > 0, peaks, 0.0)


def band_occupancy(doppler: DopplerSlice, fraction: float = 0.1) -> float:
    """
    Return the mean number of bins per frame above a fraction of the slice peak.

    A single moving diaphragm lights up few bins; several articulators moving at
    different speeds light up many.
    """
    magnitudes = np.where(doppler.carrier_mask(), 0.0, doppler.magnitudes)
    peak = float(magnitudes.max()) if magnitudes.size else 0.0
    if peak <= 0:
        return 0.0
    return float(np.mean(np.sum(magnitudes > fraction * peak, axis=1)))
