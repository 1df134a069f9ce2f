"""
Contain the energy-based fallback segmenter.

It is used when no alignment file accompanies a recording. It finds contiguous runs of
frames whose energy exceeds a fraction of the median energy of the voiced frames, and
labels them `seg_0`, `seg_1`, and so on. It does not recognize phonemes.
"""

# Python imports
from typing import List
import logging

# 3rd party imports
import numpy as np

# Our imports
from gesturelive.signal.audio import AudioBuffer
from gesturelive.segmentation.utterance import (
    PhonemeSegment,
    SegmentationSource,
    SegmentedUtterance,
)

logger = logging.getLogger(__name__)

DEFAULT_FRAME_MS = 20.0
DEFAULT_ENERGY_THRESHOLD_RATIO = 0.25

# Frames below this fraction of the loudest frame count as silence when the median
# energy of the voiced portion is computed.
_SILENCE_FLOOR_RATIO = 1e-6


def segment_by_energy(
    voice: AudioBuffer,
    frame_ms: float = DEFAULT_FRAME_MS,
    energy_threshold_ratio: float = DEFAULT_ENERGY_THRESHOLD_RATIO,
) -> SegmentedUtterance:
    """
    Segment a voice-band signal into contiguous above-threshold regions.

    :param voice: The single-channel voice-band signal.
    :param frame_ms: The analysis frame length in milliseconds.
    :param energy_threshold_ratio: The threshold as a fraction of the median energy of
      the voiced frames.

    :returns The utterance with source ENERGY_FALLBACK; an all-silent input yields no
      segments.
    """
    data = voice.data()
    sample_rate = float(voice.sample_rate)
    duration = voice.duration_seconds
    frame_len = max(1, int(round(frame_ms * sample_rate / 1000.0)))
    frame_count = data.size // frame_len
    if frame_count == 0:
        return SegmentedUtterance((), SegmentationSource.ENERGY_FALLBACK, duration)

    energies = np.sum(
        data[: frame_count * frame_len].reshape(frame_count, frame_len) ** 2, axis=1
    )
    peak = float(energies.max())
    if peak <= 0.0:
        logger.info("Voice band is silent; the energy segmenter found no segments.")
        return SegmentedUtterance((), SegmentationSource.ENERGY_FALLBACK, duration)

    voiced = energies[energies > _SILENCE_FLOOR_RATIO * peak]
    threshold = energy_threshold_ratio * float(np.median(voiced))
    active = energies > threshold

    segments: List[PhonemeSegment] = []
    # Rising and falling edges of the activity mask delimit the runs.
    edges = np.diff(np.concatenate(([0], active.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    for index, (start, stop) in enumerate(zip(starts, stops)):
        start_s = start * frame_len / sample_rate
        end_s = min(duration, stop * frame_len / sample_rate)
        segments.append(PhonemeSegment(f"seg_{index}", start_s, end_s))
    logger.debug(
        f"Energy segmenter found {len(segments)} segments with threshold {threshold:.3g}."
    )
    return SegmentedUtterance(
        tuple(segments), SegmentationSource.ENERGY_FALLBACK, duration
    )
