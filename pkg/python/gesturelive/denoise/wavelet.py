"""
Contain the multi-level discrete wavelet transform and its detail thresholding.

Each contour is decomposed into an approximation and one detail sequence per level.
Detail coefficients below a per-level threshold are treated as noise and shrunk to
zero, then the contour is rebuilt with the inverse transform.

With the default symmetric extension, a level-k detail sequence of a length-n input
holds floor((n_{k-1} + L - 1) / 2) coefficients, where L is the filter length (8 for
db4) and n_0 = n. A length-100 contour thus yields 53, 30 and 18 coefficients.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass
from typing import Tuple
import math
import warnings

# 3rd party imports
import numpy as np
import numpy.typing as npt
import pywt

# Our imports
from gesturelive.denoise import ThresholdError, WaveletLengthError
from gesturelive.features.contours import ContourSet

DEFAULT_WAVELET = "db4"
DEFAULT_LEVELS = 3
DEFAULT_MODE = "symmetric"
DEFAULT_MULTIPLIER = 1.0

# Scales the median absolute deviation of Gaussian noise to its standard deviation.
_MAD_TO_SIGMA = 0.6745


@dataclass(frozen=True)
class WaveletDecomposition:
    """
    The coefficients of a multi-level DWT.

    `details[0]` is the finest level (level 1); `approx` belongs to the coarsest
    level.
    """

    approx: npt.NDArray[np.float64]
    details: Tuple[npt.NDArray[np.float64], ...]
    wavelet_name: str
    original_length: int
    mode: str = DEFAULT_MODE

    @property
    def levels(self) -> int:
        """Return the number of decomposition levels."""
        return len(self.details)

    def detail_lengths(self) -> Tuple[int, ...]:
        """Return the number of coefficients at every level, finest first."""
        return tuple(int(d.size) for d in self.details)


def dwt_decompose(
    contour: npt.ArrayLike,
    levels: int = DEFAULT_LEVELS,
    wavelet: str = DEFAULT_WAVELET,
    mode: str = DEFAULT_MODE,
) -> WaveletDecomposition:
    """
    Decompose a sequence with a multi-level DWT.

    :param contour: The sequence to decompose.
    :param levels: The number of levels.
    :param wavelet: A PyWavelets wavelet name.
    :param mode: A PyWavelets signal extension mode.

    :returns The decomposition.

    :raises WaveletLengthError if the sequence is shorter than 2 ** levels.
    """
    # PyWavelets rejects read-only buffers, and ContourSet rows are frozen.
    values = np.array(contour, dtype=np.float64, copy=True).ravel()
    minimum = 2**levels
    if values.size < minimum:
        raise WaveletLengthError(
            f"A {levels}-level decomposition needs at least {minimum} samples, got "
            f"{values.size}."
        )
    with warnings.catch_warnings():
        # Short contours trip PyWavelets' boundary-effect warning; reconstruction
        # is still exact.
        warnings.simplefilter("ignore", UserWarning)
        coeffs = pywt.wavedec(values, wavelet, mode=mode, level=levels)
    return WaveletDecomposition(
        approx=np.asarray(coeffs[0], dtype=np.float64),
        details=tuple(np.asarray(d, dtype=np.float64) for d in reversed(coeffs[1:])),
        wavelet_name=wavelet,
        original_length=int(values.size),
        mode=mode,
    )


def level_threshold(details: npt.NDArray[np.float64], multiplier: float) -> float:
    """
    Return the universal threshold of one detail level.

    t = multiplier * sigma * sqrt(2 ln n) with the robust estimate
    sigma = median(|d|) / 0.6745.
    """
    if details.size == 0:
        return 0.0
    sigma = float(np.median(np.abs(details))) / _MAD_TO_SIGMA
    return multiplier * sigma * math.sqrt(2.0 * math.log(details.size))


def threshold_details(
    decomp: WaveletDecomposition, multiplier: float = DEFAULT_MULTIPLIER
) -> WaveletDecomposition:
    """
    Soft-threshold every detail level with its own universal threshold.

    Coefficients with |d| <= t_k become 0 and the others shrink toward 0 by t_k. The
    approximation is left alone.

    :param decomp: The decomposition.
    :param multiplier: Scales every level's threshold; 0 leaves the input unchanged.

    :returns The thresholded decomposition.

    :raises ThresholdError if the multiplier is negative.
    """
    if multiplier < 0:
        raise ThresholdError(f"Threshold multiplier must be >= 0, got {multiplier}.")
    if multiplier == 0:
        return decomp
    details = tuple(
        np.asarray(
            pywt.threshold(d, level_threshold(d, multiplier), mode="soft"),
            dtype=np.float64,
        )
        for d in decomp.details
    )
    return WaveletDecomposition(
        decomp.approx, details, decomp.wavelet_name, decomp.original_length, decomp.mode
    )


def dwt_reconstruct(decomp: WaveletDecomposition) -> npt.NDArray[np.float64]:
    """Invert a decomposition and trim the result to the original length."""
    coeffs = [decomp.approx, *reversed(decomp.details)]
    rebuilt = pywt.waverec(coeffs, decomp.wavelet_name, mode=decomp.mode)
    return np.asarray(rebuilt[: decomp.original_length], dtype=np.float64)


def denoise_contour(
    contour: npt.ArrayLike,
    multiplier: float = DEFAULT_MULTIPLIER,
    levels: int = DEFAULT_LEVELS,
    wavelet: str = DEFAULT_WAVELET,
    mode: str = DEFAULT_MODE,
) -> npt.NDArray[np.float64]:
    """Decompose, threshold and rebuild one contour; its length is preserved."""
    decomp = dwt_decompose(contour, levels, wavelet, mode)
    return dwt_reconstruct(threshold_details(decomp, multiplier))


def denoise_contour_set(
    contours: ContourSet,
    multiplier: float = DEFAULT_MULTIPLIER,
    levels: int = DEFAULT_LEVELS,
    wavelet: str = DEFAULT_WAVELET,
    mode: str = DEFAULT_MODE,
) -> ContourSet:
    """
    Denoise each of the 11 contours of a set independently.

    :raises WaveletLengthError if the contours are shorter than 2 ** levels.
    """
    denoised = np.vstack(
        [denoise_contour(row, multiplier, levels, wavelet, mode) for row in contours.values]
    )
    return contours.with_values(denoised)
