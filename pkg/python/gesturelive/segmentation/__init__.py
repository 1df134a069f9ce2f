"""
Labeled phoneme intervals: alignment files, the energy fallback and pause removal.
"""

from gesturelive.errors import GestureLiveError


class SegmentationError(GestureLiveError):
    """Base class for segmentation errors."""

    pass


class AlignmentParseError(SegmentationError):
    """Raised when an alignment file is malformed or its intervals overlap."""

    pass


class AlignmentRangeError(SegmentationError):
    """Raised when an alignment interval falls outside the utterance."""

    pass
