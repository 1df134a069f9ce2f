"""Tests for correlation, templates, similarity scores and threshold calibration."""

# Python imports
import logging
import math

# 3rd party imports
import numpy as np
import pytest

# Our imports
from gesturelive.features.contours import ContourSet
from gesturelive.matching import (
    EnrollmentError,
    ScoringError,
    UndefinedCorrelationError,
)
from gesturelive.matching.correlation import is_flat, pearson, weighted_correlation
from gesturelive.matching.decision import (
    FeatureMode,
    Verdict,
    accuracy_at,
    calibrate_threshold,
    decide,
    mode_score,
    roc_table,
    score_text_dependent,
    score_text_independent,
    weighted_similarity,
)
from gesturelive.matching.templates import (
    MAX_WEIGHT,
    PassphraseTemplate,
    PhonemeTemplate,
    build_passphrase_template,
    build_phoneme_templates,
    phoneme_weight,
)


def _contours(values, frames, labels):
    return ContourSet(np.asarray(values, dtype=np.float64), frames, labels, 20000.0, 1.0)


def _phoneme_template(label, block, weight=1.0):
    return PhonemeTemplate(label, _contours(block, (block.shape[1],), (label,)), weight, 2)


# ---------------------------------------------------------------------------
# Correlation
# ---------------------------------------------------------------------------


class TestPearson:
    def test_matches_brute_force(self, rng):
        for _ in range(1000):
            n = int(rng.integers(2, 40))
            a, b = rng.normal(size=n), rng.normal(size=n)
            da, db = a - a.mean(), b - b.mean()
            expected = np.sum(da * db) / math.sqrt(np.sum(da**2) * np.sum(db**2))
            assert pearson(a, b) == pytest.approx(expected, abs=1e-12)

    def test_perfect_and_inverse(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
        assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_constant_sequence(self):
        with pytest.raises(UndefinedCorrelationError):
            pearson([1, 1, 1], [1, 2, 3])

    def test_positive_affine_invariance(self, rng):
        a, b = rng.normal(size=50), rng.normal(size=50)
        r = pearson(a, b)
        assert pearson(2.5 * a + 3.0, b) == pytest.approx(r, abs=1e-12)
        assert pearson(a, 0.01 * b - 7.0) == pytest.approx(r, abs=1e-12)
        assert pearson(-a, b) == pytest.approx(-r, abs=1e-12)

    def test_rounding_noise_counts_as_constant(self):
        with pytest.raises(UndefinedCorrelationError):
            pearson([0.5, 0.5 + 1e-13, 0.5 - 1e-13], [1, 2, 3])
        assert is_flat(np.array([1e6, 1e6 + 1e-4]))
        assert not is_flat(np.array([0.0, 1e-6]))

    def test_length_mismatch(self):
        with pytest.raises(ScoringError, match="equal length"):
            pearson([1, 2, 3], [1, 2])


class TestWeightedCorrelation:
    def test_matches_brute_force(self, rng):
        for _ in range(200):
            count = int(rng.integers(1, 5))
            lengths = rng.integers(2, 12, size=count)
            tests = [rng.normal(size=(11, n)) for n in lengths]
            templates = [rng.normal(size=(11, n)) for n in lengths]
            weights = rng.uniform(0.1, 10.0, size=count)
            rho = weighted_correlation(tests, templates, weights)
            for c in range(11):
                cross = power_a = power_b = 0.0
                for a, b, w in zip(tests, templates, weights):
                    da, db = a[c] - a[c].mean(), b[c] - b[c].mean()
                    cross += w * w * np.sum(da * db)
                    power_a += w * w * np.sum(da * da)
                    power_b += w * w * np.sum(db * db)
                expected = cross / math.sqrt(power_a * power_b)
                assert rho[c] == pytest.approx(expected, abs=1e-12)

    def test_self_similarity_is_one(self, rng):
        blocks = [rng.normal(size=(11, 5)), rng.normal(size=(11, 8))]
        rho = weighted_correlation(blocks, blocks, [0.2, 50.0])
        np.testing.assert_allclose(rho, 1.0)

    def test_flat_blocks(self, rng):
        template = rng.normal(size=(11, 6))
        template[3] = 2.0
        test = rng.normal(size=(11, 6))
        test[4] = 1.0
        rho = weighted_correlation([test], [template], [1.0])
        assert math.isnan(rho[3])
        assert rho[4] == 0.0

    def test_flat_up_to_rounding(self, rng):
        template = rng.normal(size=(11, 6))
        test = rng.normal(size=(11, 6))
        test[2] = 0.3 + 1e-13 * rng.normal(size=6)
        template[5] = 0.7 + 1e-13 * rng.normal(size=6)
        rho = weighted_correlation([test], [template], [2.0])
        assert rho[2] == 0.0
        assert math.isnan(rho[5])

    def test_count_mismatch(self, rng):
        with pytest.raises(ScoringError):
            weighted_correlation([rng.normal(size=(11, 3))], [], [1.0])
        with pytest.raises(ScoringError, match="at least one"):
            weighted_correlation([], [], [])


# ---------------------------------------------------------------------------
# Templates
# ---------------------------------------------------------------------------


class TestPhonemeWeight:
    def test_disjoint_trials(self):
        weight = phoneme_weight([np.zeros((11, 3)), np.ones((11, 3))])
        assert weight == pytest.approx(6 / (1e-6 + 33))

    def test_identical_trials_are_capped(self):
        block = np.ones((11, 3))
        assert phoneme_weight([block, block]) == MAX_WEIGHT

    def test_unequal_lengths_use_common_frames(self):
        weight = phoneme_weight([np.zeros((11, 2)), np.full((11, 4), 0.5)])
        assert weight == pytest.approx(6 / (1e-6 + 11), rel=1e-9)

    def test_three_trials_sum_pairs(self):
        blocks = [np.zeros((11, 2)), np.ones((11, 2)), np.full((11, 2), 3.0)]
        # Pair areas: 22, 66 and 44.
        assert phoneme_weight(blocks) == pytest.approx(6 / (1e-6 + 132))

    def test_needs_two_trials(self):
        with pytest.raises(EnrollmentError, match="at least 2"):
            phoneme_weight([np.zeros((11, 3))])


class TestPassphraseTemplate:
    def test_mean_of_aligned_trials(self, rng):
        first = _contours(rng.normal(size=(11, 7)), (3, 4), ("s", "eh"))
        second = _contours(rng.normal(size=(11, 7)), (3, 4), ("s", "eh"))
        third = _contours(rng.normal(size=(11, 9)), (4, 5), ("s", "eh"))
        template = build_passphrase_template([first, second, third], min_trials=3)
        assert template.trial_count == 3
        assert template.contours.frames_per_phoneme == (3, 4)
        assert template.phoneme_labels == ("s", "eh")
        # The first column of every block is an endpoint and survives resampling.
        expected = (first.values[:, 0] + second.values[:, 0] + third.values[:, 0]) / 3
        np.testing.assert_allclose(template.contours.values[:, 0], expected)

    def test_trial_order_does_not_matter(self, rng):
        trials = [
            _contours(rng.normal(size=(11, 7)), (3, 4), ("s", "eh")) for _ in range(4)
        ]
        forward = build_passphrase_template(trials)
        backward = build_passphrase_template(trials[::-1])
        shuffled = build_passphrase_template([trials[i] for i in (2, 0, 3, 1)])
        np.testing.assert_allclose(backward.contours.values, forward.contours.values)
        np.testing.assert_allclose(shuffled.contours.values, forward.contours.values)
        blocks = [t.values[:, :3] for t in trials]
        assert phoneme_weight(blocks[::-1]) == pytest.approx(phoneme_weight(blocks))

    def test_too_few_trials(self, rng):
        trial = _contours(rng.normal(size=(11, 4)), (4,), ("s",))
        with pytest.raises(EnrollmentError, match="at least 3"):
            build_passphrase_template([trial, trial], min_trials=3)

    def test_phoneme_count_mismatch(self, rng):
        one = _contours(rng.normal(size=(11, 4)), (4,), ("s",))
        two = _contours(rng.normal(size=(11, 4)), (2, 2), ("s", "eh"))
        with pytest.raises(EnrollmentError, match="different phoneme counts"):
            build_passphrase_template([one, two, one])


class TestPhonemeTemplates:
    def test_builds_weighted_templates(self, rng, caplog):
        corpus = [
            _contours(rng.normal(size=(11, 7)), (3, 4), ("s", "eh")),
            _contours(rng.normal(size=(11, 8)), (5, 3), ("s", "n")),
            _contours(rng.normal(size=(11, 4)), (4,), ("s",)),
        ]
        with caplog.at_level(logging.WARNING):
            templates, excluded = build_phoneme_templates(corpus)
        assert sorted(templates) == ["s"]
        assert excluded == ["eh", "n"]
        assert "'eh'" in caplog.text
        template = templates["s"]
        assert template.frame_count == 4
        assert template.trial_count == 3
        assert 0 < template.weight <= MAX_WEIGHT


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------


class TestTextDependentScore:
    def test_self_score_is_one(self, rng):
        contours = _contours(rng.normal(size=(11, 9)), (4, 5), ("s", "eh"))
        template = PassphraseTemplate(contours, 3)
        for mode in FeatureMode:
            assert score_text_dependent(contours, template, mode).score == pytest.approx(1.0)

    def test_flat_template_contour_left_out(self, rng):
        values = rng.normal(size=(11, 9))
        values[2] = 0.0
        template = PassphraseTemplate(_contours(values, (9,), ("s",)), 3)
        test = _contours(rng.normal(size=(11, 9)), (9,), ("s",))
        score = score_text_dependent(test, template)
        assert score.excluded_contours() == ["eb3"]
        kept = [v for v in score.per_contour_scores if not math.isnan(v)]
        assert score.score == pytest.approx(np.mean(kept))

    def test_flat_test_contour_scores_zero(self, rng):
        template = PassphraseTemplate(_contours(rng.normal(size=(11, 9)), (9,), ("s",)), 3)
        values = np.array(template.contours.values)
        values[7] = 0.0
        score = score_text_dependent(_contours(values, (9,), ("s",)), template)
        assert score.per_contour_scores[7] == 0.0
        assert score.score == pytest.approx(10 / 11)

    def test_phoneme_count_mismatch_resamples_whole(self, rng, caplog):
        values = rng.normal(size=(11, 9))
        template = PassphraseTemplate(_contours(values, (4, 5), ("s", "eh")), 3)
        with caplog.at_level(logging.WARNING):
            score = score_text_dependent(_contours(values, (9,), ("x",)), template)
        assert score.score == pytest.approx(1.0)
        assert "resampling the whole utterance" in caplog.text

    def test_mode_selects_contours(self):
        per_contour = [1.0] * 6 + [0.0] * 5
        assert mode_score(per_contour, FeatureMode.ENERGY) == 1.0
        assert mode_score(per_contour, FeatureMode.FREQUENCY) == 0.0
        assert mode_score(per_contour, FeatureMode.COMBINED) == pytest.approx(6 / 11)

    def test_all_contours_left_out(self):
        with pytest.raises(ScoringError, match="constant"):
            mode_score([math.nan] * 11, FeatureMode.FREQUENCY)


class TestTextIndependentScore:
    def test_coverage_and_self_score(self, rng):
        s_block, eh_block = rng.normal(size=(11, 4)), rng.normal(size=(11, 6))
        templates = {
            "s": _phoneme_template("s", s_block, 3.0),
            "eh": _phoneme_template("eh", eh_block, 0.5),
        }
        test = ContourSet.from_blocks(
            [s_block, rng.normal(size=(11, 5)), eh_block], ("s", "zh", "eh"), 20000.0, 1.0
        )
        score = score_text_independent(test, templates)
        assert score.coverage == pytest.approx(2 / 3)
        assert score.score == pytest.approx(1.0)
        assert weighted_similarity(test, templates) == pytest.approx(1.0)

    def test_blocks_resampled_to_template_length(self, rng):
        block = np.tile(np.linspace(0.0, 1.0, 5), (11, 1))
        templates = {"s": _phoneme_template("s", block)}
        test = _contours(np.tile(np.linspace(0.0, 1.0, 9), (11, 1)), (9,), ("s",))
        assert score_text_independent(test, templates).score == pytest.approx(1.0)

    def test_no_phoneme_matches(self, rng):
        templates = {"s": _phoneme_template("s", rng.normal(size=(11, 4)))}
        test = _contours(rng.normal(size=(11, 4)), (4,), ("eh",))
        with pytest.raises(ScoringError, match="has a template"):
            score_text_independent(test, templates)


# ---------------------------------------------------------------------------
# Decision and calibration
# ---------------------------------------------------------------------------


class TestDecide:
    def test_strictly_above_is_live(self):
        assert decide(0.51, 0.5).verdict is Verdict.LIVE
        assert decide(0.5, 0.5).verdict is Verdict.ATTACK
        assert decide(-0.2, 0.5).verdict is Verdict.ATTACK

    def test_keeps_score_details(self, rng):
        contours = _contours(rng.normal(size=(11, 9)), (9,), ("s",))
        score = score_text_dependent(contours, PassphraseTemplate(contours, 3))
        decision = decide(score, 0.9)
        assert decision.verdict is Verdict.LIVE
        assert decision.per_contour_scores == score.per_contour_scores
        assert decision.feature_mode is FeatureMode.COMBINED


class TestCalibration:
    def test_separable_scores(self):
        threshold, eer = calibrate_threshold([0.9, 0.95], [0.1, 0.2])
        assert threshold == pytest.approx(0.55)
        assert eer == 0.0

    def test_interpolated_crossing(self):
        threshold, eer = calibrate_threshold([0.8, 0.6, 0.9], [0.5, 0.7])
        assert threshold == pytest.approx(0.6 + 0.1 / 3)
        assert eer == pytest.approx(1 / 3)

    def test_identical_distributions(self):
        threshold, eer = calibrate_threshold([0.2, 0.4, 0.6], [0.2, 0.4, 0.6])
        assert threshold == pytest.approx(0.3)
        assert eer == pytest.approx(0.5)

    def test_roc_table(self):
        table = roc_table([0.9, 0.95], [0.1, 0.2])
        assert table == [
            (0.1, 0.5, 0.0),
            (0.2, 0.0, 0.0),
            (0.9, 0.0, 0.5),
            (0.95, 0.0, 1.0),
        ]

    def test_accuracy(self):
        assert accuracy_at(0.55, [0.9, 0.95], [0.1, 0.2]) == 1.0
        assert accuracy_at(0.92, [0.9, 0.95], [0.1, 0.2]) == 0.75

    def test_empty_scores(self):
        with pytest.raises(ScoringError):
            calibrate_threshold([], [0.1])
