"""
Corpus-scale checks of the whole pipeline.

These render and score hundreds of recordings and are deselected by default; run them
with `pytest -m slow`.
"""

# 3rd party imports
import pytest

# Our imports
from gesturelive.config.run_config import RunConfig
from gesturelive.evaluation import evaluate_manifest
from gesturelive.matching.decision import FeatureMode
from gesturelive.sim.corpus import MANIFEST_NAME, TrialKind, generate_corpus

pytestmark = pytest.mark.slow


def _evaluate(root, sample_rate, n_users=10, n_trials=10, n_attacks=10):
    generate_corpus(
        root,
        n_users,
        n_trials,
        seed=2024,
        sample_rate=sample_rate,
        n_attacks=n_attacks,
        attack_kinds=(TrialKind.PLAYBACK, TrialKind.MIMICRY),
    )
    config = RunConfig(sample_rate=sample_rate)
    return evaluate_manifest(root / MANIFEST_NAME, config)


def test_combined_features_separate_live_from_attacks(tmp_path):
    result = _evaluate(tmp_path, 48000.0)
    eers = {mode: result.modes[mode].eer for mode in FeatureMode}
    assert eers[FeatureMode.COMBINED] <= 0.05
    assert eers[FeatureMode.COMBINED] <= min(
        eers[FeatureMode.ENERGY], eers[FeatureMode.FREQUENCY]
    )


def test_lower_sample_rate_costs_little(tmp_path):
    low = _evaluate(tmp_path / "48k", 48000.0, n_users=4, n_trials=5, n_attacks=5)
    high = _evaluate(tmp_path / "192k", 192000.0, n_users=4, n_trials=5, n_attacks=5)
    combined = FeatureMode.COMBINED
    assert low.modes[combined].eer - high.modes[combined].eer <= 0.03
