"""
Read and write phoneme alignment files.

The native format is a UTF-8 CSV file with one `label,start_seconds,end_seconds` row per
interval, no header, sorted by start. Forced aligners frequently export a tab-separated
variant with a header row; it is accepted when `tab_separated` is set.
"""

# Python imports
from pathlib import Path
from typing import Iterable, List
import csv
import logging

# Our imports
from gesturelive.segmentation import AlignmentParseError
from gesturelive.segmentation.utterance import (
    DEFAULT_PAUSE_LABELS,
    PhonemeSegment,
    SegmentationSource,
    SegmentedUtterance,
)

logger = logging.getLogger(__name__)


def _parse_rows(rows: Iterable[List[str]], path: Path | str) -> List[PhonemeSegment]:
    segments: List[PhonemeSegment] = []
    for line_number, row in enumerate(rows, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 3:
            raise AlignmentParseError(
                f"{path}:{line_number}: expected 'label,start,end', got {row!r}."
            )
        label, start_text, end_text = (cell.strip() for cell in row)
        try:
            start, end = float(start_text), float(end_text)
        except ValueError as ex:
            raise AlignmentParseError(
                f"{path}:{line_number}: interval bounds must be decimal numbers, got "
                f"{start_text!r} and {end_text!r}."
            ) from ex
        if not end > start:
            raise AlignmentParseError(
                f"{path}:{line_number}: interval '{label}' ends at {end}, not after its "
                f"start {start}."
            )
        segments.append(PhonemeSegment(label, start, end))
    return segments


def load_alignment(
    path: Path | str,
    utterance_duration: float,
    pause_labels: Iterable[str] = DEFAULT_PAUSE_LABELS,
    tab_separated: bool = False,
) -> SegmentedUtterance:
    """
    Load an alignment file into a `SegmentedUtterance`.

    Overlap and range checks run on every row, pauses included, before rows carrying a
    pause label are dropped.

    :param path: The alignment file.
    :param utterance_duration: The duration of the utterance in seconds.
    :param pause_labels: Labels that mark silences and pauses.
    :param tab_separated: Read the tab-separated variant and skip its header row.

    :returns The utterance, with source EXTERNAL_ALIGNMENT.

    :raises AlignmentParseError if the file is malformed or intervals overlap.
    :raises AlignmentRangeError if an interval extends beyond the utterance.
    """
    with open(path, "r", encoding="utf-8", newline="") as file:
        reader = csv.reader(file, delimiter="\t" if tab_separated else ",")
        rows = list(reader)
    if tab_separated and rows:
        rows = rows[1:]
    segments = _parse_rows(rows, path)
    SegmentedUtterance(
        tuple(segments), SegmentationSource.EXTERNAL_ALIGNMENT, utterance_duration
    )
    pauses = {p.lower() for p in pause_labels}
    kept = tuple(s for s in segments if s.label.lower() not in pauses)
    logger.debug(f"Loaded {len(kept)} phoneme segments from {path}.")
    return SegmentedUtterance(
        kept, SegmentationSource.EXTERNAL_ALIGNMENT, utterance_duration
    )


def save_alignment(utterance: SegmentedUtterance, path: Path | str):
    """
    Write an utterance's segments in the native CSV alignment format.

    Bounds are written with the shortest representation that reads back to the same
    float, so loading the file reproduces the segments exactly.
    """
    with open(path, "w", encoding="utf-8", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        for segment in utterance.segments:
            writer.writerow([segment.label, repr(segment.start_s), repr(segment.end_s)])
