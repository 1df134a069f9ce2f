"""Tests for the wavelet decomposition and contour denoising."""

# Python imports
import math

# 3rd party imports
import numpy as np
import pytest

# Our imports
from gesturelive.denoise import ThresholdError, WaveletLengthError
from gesturelive.denoise.wavelet import (
    denoise_contour,
    denoise_contour_set,
    dwt_decompose,
    dwt_reconstruct,
    level_threshold,
    threshold_details,
)
from gesturelive.features.contours import ContourSet


class TestDecomposition:
    def test_detail_lengths(self, rng):
        decomp = dwt_decompose(rng.normal(size=100))
        assert decomp.levels == 3
        assert decomp.detail_lengths() == (53, 30, 18)
        assert decomp.approx.size == 18

    @pytest.mark.parametrize("length", [8, 9, 31, 100, 257, 512])
    def test_reconstruction_is_exact(self, rng, length):
        contour = rng.normal(size=length)
        rebuilt = dwt_reconstruct(dwt_decompose(contour))
        assert rebuilt.size == length
        np.testing.assert_allclose(rebuilt, contour, rtol=1e-9, atol=1e-12)

    def test_too_short(self):
        with pytest.raises(WaveletLengthError, match="at least 8"):
            dwt_decompose(np.ones(7))


class TestThresholding:
    def test_universal_threshold(self):
        details = np.array([1.0, -2.0, 3.0, -4.0])
        expected = 2.5 / 0.6745 * math.sqrt(2 * math.log(4))
        assert level_threshold(details, 1.0) == pytest.approx(expected)
        assert level_threshold(details, 0.5) == pytest.approx(expected / 2)

    def test_soft_threshold_shrinks(self, rng):
        decomp = dwt_decompose(rng.normal(size=64))
        thresholded = threshold_details(decomp, 1.0)
        for before, after in zip(decomp.details, thresholded.details):
            t = level_threshold(before, 1.0)
            np.testing.assert_array_equal(after[np.abs(before) <= t], 0.0)
            kept = np.abs(before) > t
            np.testing.assert_allclose(np.abs(after[kept]), np.abs(before[kept]) - t)
        np.testing.assert_array_equal(thresholded.approx, decomp.approx)

    def test_zero_multiplier_is_identity(self, rng):
        contour = rng.normal(size=50)
        np.testing.assert_allclose(
            denoise_contour(contour, multiplier=0.0), contour, rtol=1e-9, atol=1e-12
        )

    def test_detail_energy_never_grows(self, rng):
        decomp = dwt_decompose(rng.normal(size=128))
        thresholded = threshold_details(decomp, 1.0)
        for before, after in zip(decomp.details, thresholded.details):
            assert np.sum(after**2) <= np.sum(before**2)

    def test_larger_multiplier_removes_more(self, rng):
        decomp = dwt_decompose(rng.normal(size=128))
        previous = None
        for multiplier in (0.25, 0.5, 1.0, 2.0, 4.0):
            details = threshold_details(decomp, multiplier).details
            zeros = sum(int(np.count_nonzero(d == 0.0)) for d in details)
            energy = sum(float(np.sum(d**2)) for d in details)
            if previous is not None:
                assert zeros >= previous[0]
                assert energy <= previous[1] + 1e-12
            previous = (zeros, energy)

    def test_negative_multiplier(self, rng):
        with pytest.raises(ThresholdError, match=">= 0"):
            threshold_details(dwt_decompose(rng.normal(size=16)), -1.0)


class TestDenoising:
    def test_reduces_noise(self, rng):
        clean = np.sin(2 * np.pi * 3 * np.arange(256) / 256)
        noisy = clean + rng.normal(scale=0.2, size=clean.size)
        denoised = denoise_contour(noisy)
        assert np.mean((denoised - clean) ** 2) < 0.6 * np.mean((noisy - clean) ** 2)

    def test_contour_set_keeps_layout(self, rng):
        contours = ContourSet(rng.normal(size=(11, 40)), (15, 25), ("s", "eh"), 20000.0, 1.0)
        denoised = denoise_contour_set(contours)
        assert denoised.values.shape == (11, 40)
        assert denoised.frames_per_phoneme == (15, 25)
        assert not np.array_equal(denoised.values, contours.values)

    def test_contour_set_too_short(self, rng):
        contours = ContourSet(rng.normal(size=(11, 6)), (6,), ("s",), 20000.0, 1.0)
        with pytest.raises(WaveletLengthError):
            denoise_contour_set(contours)

    def test_frozen_contour_set(self, rng):
        contours = ContourSet(rng.normal(size=(11, 32)), (32,), ("s",), 20000.0, 1.0)
        assert not contours.values.flags.writeable
        denoised = denoise_contour_set(contours)
        assert denoised.values.shape == (11, 32)
        assert not contours.values.flags.writeable

    def test_read_only_row(self, rng):
        row = rng.normal(size=24)
        row.flags.writeable = False
        assert denoise_contour(row).size == 24
