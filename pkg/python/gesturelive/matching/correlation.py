"""
Contain the correlation measures used to compare contours with templates.

`pearson` compares two whole contours. `weighted_correlation` compares the phoneme
blocks of a test utterance with phoneme templates, each block's contribution scaled
by its template weight. Every block is centered on its own mean, and the weight
multiplies every centered sample of both the test and the template block, so a test
identical to its templates scores exactly 1 whatever the weights.
"""

# Python imports
from typing import Sequence

# 3rd party imports
import numpy as np
import numpy.typing as npt

# Our imports
from gesturelive.matching import ScoringError, UndefinedCorrelationError

# Relative spread below which a sequence counts as constant; STFT frames of a
# stationary tone differ only by rounding.
_FLAT_TOLERANCE = 1e-9


def is_flat(values: npt.NDArray[np.float64]) -> bool:
    """Return whether a sequence is constant up to rounding."""
    scale = max(1.0, float(np.max(np.abs(values))))
    return float(np.ptp(values)) <= _FLAT_TOLERANCE * scale


def pearson(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """
    Return the Pearson correlation coefficient of two equal-length sequences.

    r = sum((a - mean a)(b - mean b)) / ((n - 1) s_a s_b) with sample standard
    deviations, clipped to [-1, 1].

    :raises ScoringError if the lengths differ or are below 2.
    :raises UndefinedCorrelationError if either sequence is constant, up to a relative
      spread of 1e-9.
    """
    x = np.asarray(a, dtype=np.float64).ravel()
    y = np.asarray(b, dtype=np.float64).ravel()
    if x.size != y.size or x.size < 2:
        raise ScoringError(
            f"Correlation needs two sequences of equal length >= 2, got {x.size} and "
            f"{y.size}."
        )
    if is_flat(x) or is_flat(y):
        raise UndefinedCorrelationError(
            "Correlation is undefined for a constant sequence."
        )
    dx = x - x.mean()
    dy = y - y.mean()
    r = float(np.sum(dx * dy)) / ((x.size - 1) * np.std(x, ddof=1) * np.std(y, ddof=1))
    return float(np.clip(r, -1.0, 1.0))


def weighted_correlation(
    test_blocks: Sequence[npt.NDArray[np.float64]],
    template_blocks: Sequence[npt.NDArray[np.float64]],
    weights: Sequence[float],
) -> npt.NDArray[np.float64]:
    """
    Return the weighted correlation of every contour across matched phoneme blocks.

    For contour c, with A_i and B_i the mean-centered test and template blocks of
    phoneme i and w_i its weight::

        rho_c = sum_i w_i^2 sum_t A_i(t) B_i(t)
                / sqrt(sum_i w_i^2 sum_t A_i(t)^2 * sum_i w_i^2 sum_t B_i(t)^2)

    The weight is applied to every point of both blocks, so it enters the sums
    squared.

    :param test_blocks: (contours, frames) test blocks, each already resampled to the
      length of its template block.
    :param template_blocks: The matching template blocks.
    :param weights: One non-negative weight per block.

    :returns One value per contour in [-1, 1]; NaN where the templates have no
      variation, 0 where only the test has none.

    :raises ScoringError if no block is given or the shapes disagree.
    """
    if not test_blocks:
        raise ScoringError("Weighted correlation needs at least one matched phoneme.")
    if not len(test_blocks) == len(template_blocks) == len(weights):
        raise ScoringError(
            f"Got {len(test_blocks)} test blocks, {len(template_blocks)} template "
            f"blocks and {len(weights)} weights."
        )
    contour_count = int(np.asarray(test_blocks[0]).shape[0])
    cross = np.zeros(contour_count)
    test_power = np.zeros(contour_count)
    template_power = np.zeros(contour_count)
    test_floor = np.zeros(contour_count)
    template_floor = np.zeros(contour_count)
    for test, template, weight in zip(test_blocks, template_blocks, weights):
        a = np.asarray(test, dtype=np.float64)
        b = np.asarray(template, dtype=np.float64)
        if a.shape != b.shape:
            raise ScoringError(
                f"Test block of shape {a.shape} does not match template block of shape "
                f"{b.shape}."
            )
        wa = weight * (a - a.mean(axis=1, keepdims=True))
        wb = weight * (b - b.mean(axis=1, keepdims=True))
        cross += np.sum(wa * wb, axis=1)
        test_power += np.sum(wa * wa, axis=1)
        template_power += np.sum(wb * wb, axis=1)
        test_floor += (
            weight**2 * a.shape[1] * np.maximum(1.0, np.abs(a).max(axis=1)) ** 2
        )
        template_floor += (
            weight**2 * b.shape[1] * np.maximum(1.0, np.abs(b).max(axis=1)) ** 2
        )
    test_varies = test_power > _FLAT_TOLERANCE**2 * test_floor
    template_varies = template_power > _FLAT_TOLERANCE**2 * template_floor
    denominator = np.sqrt(test_power * template_power)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(test_varies & (denominator > 0), cross / denominator, 0.0)
    rho = np.where(template_varies, rho, np.nan)
    return np.clip(rho, -1.0, 1.0)
