"""
Contain the phoneme segment types and pause removal.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Tuple

# Our imports
from gesturelive.segmentation import AlignmentParseError, AlignmentRangeError

DEFAULT_PAUSE_LABELS = frozenset({"sil", "sp", "pau", ""})

# Floating-point slack when comparing interval boundaries read from text.
_BOUNDARY_TOLERANCE_S = 1e-9


class SegmentationSource(Enum):
    """
    Where the segments of an utterance came from.

    - EXTERNAL_ALIGNMENT: An alignment file, typically a forced aligner's output.
    - ENERGY_FALLBACK: The energy-based segmenter; labels are placeholders.
    """

    EXTERNAL_ALIGNMENT = "external_alignment"
    ENERGY_FALLBACK = "energy_fallback"


@dataclass(frozen=True)
class PhonemeSegment:
    """A labeled time interval [start_s, end_s) within an utterance."""

    label: str
    start_s: float
    end_s: float

    def __post_init__(self):
        """Check that 0 <= start < end."""
        if not 0 <= self.start_s < self.end_s:
            raise AlignmentRangeError(
                f"Segment '{self.label}' has invalid bounds [{self.start_s}, "
                f"{self.end_s})."
            )

    @property
    def duration_s(self) -> float:
        """Return the duration of the segment in seconds."""
        return self.end_s - self.start_s

    def contains(self, time_s: float) -> bool:
        """Return whether the given time lies inside [start_s, end_s)."""
        return self.start_s <= time_s < self.end_s


@dataclass(frozen=True)
class SegmentedUtterance:
    """
    The ordered, non-overlapping phoneme segments of one utterance.

    Every segment lies within [0, total_duration_s].
    """

    segments: Tuple[PhonemeSegment, ...]
    source: SegmentationSource
    total_duration_s: float

    def __post_init__(self):
        """Validate ordering, overlap and range."""
        segments = tuple(self.segments)
        object.__setattr__(self, "segments", segments)
        for previous, current in zip(segments, segments[1:]):
            if current.start_s < previous.start_s:
                raise AlignmentParseError(
                    f"Segments are not sorted: '{current.label}' at {current.start_s} "
                    f"follows '{previous.label}' at {previous.start_s}."
                )
            if current.start_s < previous.end_s - _BOUNDARY_TOLERANCE_S:
                raise AlignmentParseError(
                    f"Segments '{previous.label}' [{previous.start_s}, {previous.end_s}) "
                    f"and '{current.label}' [{current.start_s}, {current.end_s}) overlap."
                )
        for segment in segments:
            if segment.end_s > self.total_duration_s + _BOUNDARY_TOLERANCE_S:
                raise AlignmentRangeError(
                    f"Segment '{segment.label}' ends at {segment.end_s} s, beyond the "
                    f"utterance duration of {self.total_duration_s} s."
                )

    @property
    def labels(self) -> Tuple[str, ...]:
        """Return the segment labels in order."""
        return tuple(s.label for s in self.segments)

    def __len__(self) -> int:
        """Return the number of segments."""
        return len(self.segments)


def remove_pauses(
    utterance: SegmentedUtterance,
    pause_labels: Iterable[str] = DEFAULT_PAUSE_LABELS,
) -> SegmentedUtterance:
    """
    Keep only the labeled phoneme intervals of an utterance.

    Gaps between segments are not represented anywhere downstream, so STFT frames whose
    centers fall in a gap are discarded during Doppler extraction. Segments carrying a
    pause label are dropped as well.

    :param utterance: The utterance.
    :param pause_labels: Labels that mark silences and pauses.

    :returns The utterance without pauses.
    """
    pauses = {p.lower() for p in pause_labels}
    kept = tuple(s for s in utterance.segments if s.label.strip().lower() not in pauses)
    return SegmentedUtterance(kept, utterance.source, utterance.total_duration_s)
