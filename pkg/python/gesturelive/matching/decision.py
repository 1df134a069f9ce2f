"""
Contain similarity scoring, the liveness decision and threshold calibration.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass
from enum import Enum
from typing import List, Mapping, Sequence, Tuple
import logging
import math

# 3rd party imports
import numpy as np
import numpy.typing as npt

# Our imports
from gesturelive.features import ContourError
from gesturelive.features.contours import (
    CONTOUR_COUNT,
    CONTOUR_NAMES,
    ENERGY_CONTOUR_COUNT,
    ContourSet,
    align_contour_set,
    resample_block,
)
from gesturelive.matching import ScoringError, UndefinedCorrelationError
from gesturelive.matching.correlation import is_flat, pearson, weighted_correlation
from gesturelive.matching.templates import PassphraseTemplate, PhonemeTemplate

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5


class FeatureMode(Enum):
    """
    Which contours are averaged into the similarity score.

    Possible values:
      ENERGY: The six energy-band frequency contours.
      FREQUENCY: The five frequency-band energy contours.
      COMBINED: All eleven contours.
    """

    ENERGY = "energy"
    FREQUENCY = "frequency"
    COMBINED = "combined"

    def contour_indices(self) -> range:
        """Return the indices of the contours selected by this mode."""
        if self is FeatureMode.ENERGY:
            return range(0, ENERGY_CONTOUR_COUNT)
        if self is FeatureMode.FREQUENCY:
            return range(ENERGY_CONTOUR_COUNT, CONTOUR_COUNT)
        return range(0, CONTOUR_COUNT)


class Verdict(Enum):
    """
    The outcome of a liveness check.

    Possible values:
      LIVE: A live speaker produced the utterance.
      ATTACK: The utterance is a replay or mimicry attack.
    """

    LIVE = "Live"
    ATTACK = "Attack"


@dataclass(frozen=True)
class SimilarityScore:
    """
    A similarity score with its per-contour breakdown.

    per_contour_scores holds one value per contour; NaN marks a contour that was left
    out because it had no variation. coverage is the fraction of test phonemes that
    found a template (always 1 for passphrase scoring).
    """

    score: float
    per_contour_scores: Tuple[float, ...]
    feature_mode: FeatureMode
    coverage: float = 1.0

    def excluded_contours(self) -> List[str]:
        """Return the names of the contours left out of the score."""
        return [
            CONTOUR_NAMES[i]
            for i, value in enumerate(self.per_contour_scores)
            if math.isnan(value)
        ]


@dataclass(frozen=True)
class LivenessDecision:
    """The verdict for one test utterance; Live if and only if score > threshold."""

    score: float
    threshold: float
    verdict: Verdict
    per_contour_scores: Tuple[float, ...]
    feature_mode: FeatureMode
    coverage: float = 1.0


def mode_score(per_contour: npt.ArrayLike, feature_mode: FeatureMode) -> float:
    """
    Average the per-contour scores selected by a feature mode, skipping NaN.

    :raises ScoringError if every selected contour is NaN.
    """
    selected = list(feature_mode.contour_indices())
    values = np.asarray(per_contour, dtype=np.float64)[selected]
    kept = values[~np.isnan(values)]
    if kept.size == 0:
        raise ScoringError(
            f"Every {feature_mode.value} contour is constant; no score can be formed."
        )
    return float(np.mean(kept))


def score_text_dependent(
    test: ContourSet,
    template: PassphraseTemplate,
    feature_mode: FeatureMode = FeatureMode.COMBINED,
) -> SimilarityScore:
    """
    Correlate a test utterance with a passphrase template contour by contour.

    The test is first resampled phoneme by phoneme to the template's frame counts; if
    its phoneme count differs, it is resampled as a whole instead. Contours that are
    constant in the template are left out; a constant test contour against a varying
    template scores 0.

    :param test: The test contour set.
    :param template: The passphrase template.
    :param feature_mode: The contours to average.

    :returns The score.

    :raises ScoringError if every selected contour is left out.
    """
    reference = template.contours
    try:
        aligned = align_contour_set(test, reference.frames_per_phoneme).values
    except ContourError:
        logger.warning(
            f"Test has {len(test.frames_per_phoneme)} phonemes but the template has "
            f"{len(reference.frames_per_phoneme)}; resampling the whole utterance."
        )
        aligned = resample_block(test.values, reference.length)
    per_contour: List[float] = []
    for index in range(CONTOUR_COUNT):
        try:
            per_contour.append(pearson(aligned[index], reference.values[index]))
        except UndefinedCorrelationError:
            if is_flat(reference.values[index]):
                logger.debug(f"Template contour {CONTOUR_NAMES[index]} is constant.")
                per_contour.append(math.nan)
            else:
                # A flat test contour against a moving template shows no relation.
                per_contour.append(0.0)
    return SimilarityScore(
        mode_score(per_contour, feature_mode), tuple(per_contour), feature_mode
    )


def score_text_independent(
    test: ContourSet,
    templates: Mapping[str, PhonemeTemplate],
    feature_mode: FeatureMode = FeatureMode.COMBINED,
) -> SimilarityScore:
    """
    Compare the phoneme blocks of a test utterance with weighted phoneme templates.

    Blocks whose label has no template are skipped and lower the coverage. Every
    matched block is resampled to its template's length, the weighted correlation is
    computed per contour, and the contours selected by the mode are averaged.

    :raises ScoringError if no phoneme matches a template.
    """
    test_blocks: List[npt.NDArray[np.float64]] = []
    template_blocks: List[npt.NDArray[np.float64]] = []
    weights: List[float] = []
    for label, block in zip(test.phoneme_labels, test.blocks()):
        template = templates.get(label)
        if template is None:
            logger.debug(f"Phoneme '{label}' has no template; skipped.")
            continue
        test_blocks.append(resample_block(block, template.frame_count))
        template_blocks.append(template.block)
        weights.append(template.weight)
    if not test_blocks:
        raise ScoringError(
            f"None of the test phonemes {list(test.phoneme_labels)} has a template."
        )
    per_contour = weighted_correlation(test_blocks, template_blocks, weights)
    return SimilarityScore(
        mode_score(per_contour, feature_mode),
        tuple(float(v) for v in per_contour),
        feature_mode,
        coverage=len(test_blocks) / len(test.phoneme_labels),
    )


def weighted_similarity(
    test: ContourSet,
    templates: Mapping[str, PhonemeTemplate],
    feature_mode: FeatureMode = FeatureMode.COMBINED,
) -> float:
    """Return the phoneme-weighted similarity of a test utterance, unmatched skipped."""
    return score_text_independent(test, templates, feature_mode).score


def decide(
    score: float | SimilarityScore,
    threshold: float = DEFAULT_THRESHOLD,
) -> LivenessDecision:
    """
    Turn a score into a verdict: Live if and only if score > threshold.

    A tie is an attack.
    """
    if isinstance(score, SimilarityScore):
        value = score.score
        per_contour = score.per_contour_scores
        feature_mode = score.feature_mode
        coverage = score.coverage
    else:
        value = float(score)
        per_contour = ()
        feature_mode = FeatureMode.COMBINED
        coverage = 1.0
    verdict = Verdict.LIVE if value > threshold else Verdict.ATTACK
    return LivenessDecision(value, threshold, verdict, per_contour, feature_mode, coverage)


def _rates(
    threshold: float,
    genuine: npt.NDArray[np.float64],
    attack: npt.NDArray[np.float64],
) -> Tuple[float, float]:
    far = float(np.mean(attack > threshold))
    frr = float(np.mean(genuine <= threshold))
    return far, frr


def roc_table(
    genuine_scores: Sequence[float], attack_scores: Sequence[float]
) -> List[Tuple[float, float, float]]:
    """
    Return (threshold, FAR, FRR) at every distinct observed score, ascending.

    FAR is the fraction of attacks scoring above the threshold and FRR the fraction of
    genuine trials scoring at or below it.
    """
    genuine = np.asarray(genuine_scores, dtype=np.float64)
    attack = np.asarray(attack_scores, dtype=np.float64)
    if genuine.size == 0 or attack.size == 0:
        raise ScoringError("ROC needs at least one genuine and one attack score.")
    candidates = np.unique(np.concatenate((genuine, attack)))
    return [(float(t), *_rates(float(t), genuine, attack)) for t in candidates]


def calibrate_threshold(
    genuine_scores: Sequence[float], attack_scores: Sequence[float]
) -> Tuple[float, float]:
    """
    Find the threshold where the false accept and false reject rates cross.

    Candidates are the distinct observed scores. At the first candidate where
    FAR - FRR stops being positive, the crossing is interpolated linearly from the
    previous candidate. If the rates are exactly equal there, the threshold is the
    midpoint between that candidate and the next one where they differ, which puts it
    in the middle of a perfectly separating gap.

    :param genuine_scores: Scores of live trials.
    :param attack_scores: Scores of attacks.

    :returns A tuple of (threshold, equal error rate).

    :raises ScoringError if either list is empty.
    """
    table = roc_table(genuine_scores, attack_scores)
    thresholds = [row[0] for row in table]
    gaps = [row[1] - row[2] for row in table]
    index = next(i for i, gap in enumerate(gaps) if gap <= 0)
    t, far, frr = table[index]
    if gaps[index] == 0:
        following = next((i for i in range(index + 1, len(table)) if gaps[i] != 0), None)
        if following is not None:
            t = (t + thresholds[following]) / 2
        return t, far
    if index == 0:
        return t, (far + frr) / 2
    t_prev, far_prev, _ = table[index - 1]
    fraction = gaps[index - 1] / (gaps[index - 1] - gaps[index])
    return (
        t_prev + fraction * (t - t_prev),
        far_prev + fraction * (far - far_prev),
    )


def accuracy_at(
    threshold: float, genuine_scores: Sequence[float], attack_scores: Sequence[float]
) -> float:
    """Return the fraction of trials classified correctly at a threshold."""
    genuine = np.asarray(genuine_scores, dtype=np.float64)
    attack = np.asarray(attack_scores, dtype=np.float64)
    total = genuine.size + attack.size
    if total == 0:
        raise ScoringError("Accuracy needs at least one score.")
    correct = int(np.sum(genuine > threshold)) + int(np.sum(attack <= threshold))
    return correct / total
