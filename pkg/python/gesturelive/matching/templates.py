"""
Contain the enrollment templates.

A passphrase template is the pointwise mean of the contour sets of several
repetitions of the same passphrase. Phoneme templates are built from a longer corpus
that covers many phonemes: the blocks of every occurrence of a phoneme are averaged,
and the template is weighted by how consistent the occurrences are.
"""

from __future__ import annotations

# Python imports
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple
import itertools
import logging

# 3rd party imports
import numpy as np
import numpy.typing as npt

# Our imports
from gesturelive.features import ContourError
from gesturelive.features.contours import (
    ContourSet,
    align_contour_set,
    resample_block,
)
from gesturelive.matching import EnrollmentError

logger = logging.getLogger(__name__)

WEIGHT_EPSILON = 1e-6
MAX_WEIGHT = 1e6
MIN_PASSPHRASE_TRIALS = 2


@dataclass(frozen=True)
class PassphraseTemplate:
    """The averaged contour set of a passphrase and the number of trials behind it."""

    contours: ContourSet
    trial_count: int

    @property
    def phoneme_labels(self) -> Tuple[str, ...]:
        """Return the phoneme labels of the passphrase in order."""
        return self.contours.phoneme_labels


@dataclass(frozen=True)
class PhonemeTemplate:
    """
    The averaged contour block of one phoneme and its consistency weight.

    `contours` is a single-phoneme contour set.
    """

    label: str
    contours: ContourSet
    weight: float
    trial_count: int

    @property
    def block(self) -> npt.NDArray[np.float64]:
        """Return the (11, frames) template block."""
        return self.contours.values

    @property
    def frame_count(self) -> int:
        """Return the template length in frames."""
        return self.contours.length


def build_passphrase_template(
    trials: Sequence[ContourSet], min_trials: int = MIN_PASSPHRASE_TRIALS
) -> PassphraseTemplate:
    """
    Average the contour sets of several repetitions of one passphrase.

    Every trial is resampled phoneme by phoneme to the frame counts of the first
    trial before the pointwise mean is taken.

    :param trials: The enrollment trials, in recording order.
    :param min_trials: The minimum number of trials.

    :returns The template, as long as the first trial.

    :raises EnrollmentError if there are too few trials or their phoneme counts
      differ.
    """
    if len(trials) < max(2, min_trials):
        raise EnrollmentError(
            f"A passphrase template needs at least {max(2, min_trials)} trials, got "
            f"{len(trials)}."
        )
    reference = trials[0]
    counts = [len(t.frames_per_phoneme) for t in trials]
    if len(set(counts)) != 1:
        raise EnrollmentError(
            f"Enrollment trials have different phoneme counts {counts}; the passphrase "
            "must be segmented identically in every trial."
        )
    aligned = [align_contour_set(t, reference.frames_per_phoneme) for t in trials]
    mean = np.mean(np.stack([a.values for a in aligned]), axis=0)
    return PassphraseTemplate(reference.with_values(mean), len(trials))


def phoneme_weight(
    trials: Sequence[npt.ArrayLike], lengths: Sequence[int] | None = None
) -> float:
    """
    Return the consistency weight of a phoneme from its enrollment occurrences.

    Trials are aligned at their first frame. For every unordered pair, the area between
    them is the sum of |A_i(t) - A_j(t)| over their common frames and over all
    contours. The weight is the total trial length divided by epsilon plus the summed
    pairwise areas, capped at 1e6.

    :param trials: (contours, frames) blocks, one per occurrence.
    :param lengths: The frame count of every trial; defaults to the block widths.

    :raises EnrollmentError if fewer than two trials are given.
    """
    blocks = [np.asarray(t, dtype=np.float64) for t in trials]
    if len(blocks) < 2:
        raise EnrollmentError(
            f"A phoneme weight needs at least 2 trials, got {len(blocks)}."
        )
    if lengths is None:
        lengths = [b.shape[1] for b in blocks]
    area = 0.0
    for first, second in itertools.combinations(blocks, 2):
        common = min(first.shape[1], second.shape[1])
        area += float(np.sum(np.abs(first[:, :common] - second[:, :common])))
    return min(MAX_WEIGHT, float(sum(lengths)) / (WEIGHT_EPSILON + area))


def build_phoneme_templates(
    corpus: Iterable[ContourSet],
) -> Tuple[Dict[str, PhonemeTemplate], List[str]]:
    """
    Build one weighted template per phoneme label found in an enrollment corpus.

    Occurrences of a label are resampled to the median length of that label and
    averaged. Labels seen fewer than twice are left out and reported.

    :param corpus: The contour sets of the enrollment utterances; their phoneme
      labels identify the blocks.

    :returns A tuple of the templates by label and the sorted excluded labels.
    """
    occurrences: Dict[str, List[npt.NDArray[np.float64]]] = defaultdict(list)
    f0_hz, bin_width_hz = 0.0, 0.0
    for contours in corpus:
        f0_hz, bin_width_hz = contours.f0_hz, contours.bin_width_hz
        for label, block in zip(contours.phoneme_labels, contours.blocks()):
            occurrences[label].append(block)

    templates: Dict[str, PhonemeTemplate] = {}
    excluded: List[str] = []
    for label in sorted(occurrences):
        blocks = occurrences[label]
        if len(blocks) < 2:
            logger.warning(
                f"Phoneme '{label}' occurs {len(blocks)} time(s); at least 2 are needed "
                "for a template, so it is excluded."
            )
            excluded.append(label)
            continue
        target = int(round(float(np.median([b.shape[1] for b in blocks]))))
        try:
            mean = np.mean(np.stack([resample_block(b, target) for b in blocks]), axis=0)
        except ContourError as ex:
            logger.warning(f"Phoneme '{label}' is excluded: {ex}")
            excluded.append(label)
            continue
        templates[label] = PhonemeTemplate(
            label=label,
            contours=ContourSet(mean, (target,), (label,), f0_hz, bin_width_hz),
            weight=phoneme_weight(blocks),
            trial_count=len(blocks),
        )
    return templates, excluded
