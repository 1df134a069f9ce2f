"""
Evaluate the liveness check over a labeled corpus.

Every user of a manifest is enrolled from their `enroll` recordings (or taken from a
profile store), their `genuine` recordings and the chosen attacks are scored against
the profile, and the equal error rate, its threshold and the accuracy at that
threshold are computed per feature mode.
"""

from __future__ import annotations

# Python imports
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple
import logging

# Our imports
from gesturelive.config.run_config import RunConfig
from gesturelive.features.contours import ContourSet
from gesturelive.matching.decision import (
    FeatureMode,
    SimilarityScore,
    accuracy_at,
    calibrate_threshold,
    roc_table,
    score_text_dependent,
    score_text_independent,
)
from gesturelive.matching.profile import ProfileMode, ProfileStore, UserProfile
from gesturelive.pipeline import analyze_file, build_profile, target_frames
from gesturelive.sim.corpus import (
    ManifestEntry,
    TrialKind,
    read_manifest,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScoredTrial:
    """The score of one recording against its user's profile."""

    path: str
    user: str
    kind: TrialKind
    score: float


@dataclass
class ModeResult:
    """The operating point of one feature mode."""

    feature_mode: FeatureMode
    threshold: float
    eer: float
    accuracy: float
    trials: List[ScoredTrial]

    def genuine_scores(self, user: str | None = None) -> List[float]:
        """Return the scores of the live trials, optionally of one user."""
        return [
            t.score
            for t in self.trials
            if not t.kind.is_attack and (user is None or t.user == user)
        ]

    def attack_scores(self, user: str | None = None) -> List[float]:
        """Return the scores of the attacks, optionally of one user."""
        return [
            t.score
            for t in self.trials
            if t.kind.is_attack and (user is None or t.user == user)
        ]

    def roc(self) -> List[Tuple[float, float, float]]:
        """Return the (threshold, FAR, FRR) table of the mode."""
        return roc_table(self.genuine_scores(), self.attack_scores())


@dataclass
class EvaluationResult:
    """The per-mode results, the profiles used and the per-user operating points."""

    modes: Dict[FeatureMode, ModeResult]
    profiles: Dict[str, UserProfile]
    per_user: Dict[str, Tuple[float, float]] = field(default_factory=dict)


def _score(
    profile: UserProfile, contours: ContourSet, feature_mode: FeatureMode
) -> SimilarityScore:
    if profile.mode is ProfileMode.TEXT_DEPENDENT:
        return score_text_dependent(contours, profile.primary_passphrase(), feature_mode)
    return score_text_independent(contours, profile.phoneme_templates, feature_mode)


def _profile_for(
    user: str,
    entries: Sequence[ManifestEntry],
    root: Path,
    config: RunConfig,
    store: ProfileStore | None,
) -> UserProfile:
    if store is not None and store.exists(user):
        return store.load(user)
    trials = [
        analyze_file(root / e.path, config).contours
        for e in entries
        if e.kind is TrialKind.ENROLL
    ]
    profile, _ = build_profile(user, ProfileMode.TEXT_DEPENDENT, trials, config)
    return profile


def evaluate_manifest(
    manifest: Path | str,
    config: RunConfig,
    attack_kinds: Sequence[TrialKind] = (TrialKind.PLAYBACK, TrialKind.MIMICRY),
    feature_modes: Sequence[FeatureMode] = tuple(FeatureMode),
    store: ProfileStore | None = None,
) -> EvaluationResult:
    """
    Score every genuine trial and attack of a corpus and calibrate each feature mode.

    :param manifest: The corpus manifest; paths in it are relative to its directory.
    :param config: The run configuration.
    :param attack_kinds: The attack kinds to include.
    :param feature_modes: The feature modes to evaluate.
    :param store: If given, stored profiles are used instead of enrolling anew.

    :returns The evaluation, with per-user operating points for the configured mode.
    """
    root = Path(manifest).parent
    by_user: Dict[str, List[ManifestEntry]] = defaultdict(list)
    for entry in read_manifest(manifest):
        by_user[entry.user].append(entry)

    scored: Dict[FeatureMode, List[ScoredTrial]] = {m: [] for m in feature_modes}
    profiles: Dict[str, UserProfile] = {}
    for user in sorted(by_user):
        entries = by_user[user]
        profile = _profile_for(user, entries, root, config, store)
        profiles[user] = profile
        for entry in entries:
            if entry.kind is TrialKind.ENROLL:
                continue
            if entry.kind.is_attack and entry.kind not in attack_kinds:
                continue
            contours = analyze_file(
                root / entry.path, config, frames_per_phoneme=target_frames(profile)
            ).contours
            for mode in feature_modes:
                score = _score(profile, contours, mode).score
                scored[mode].append(ScoredTrial(entry.path, user, entry.kind, score))
        logger.info(f"Scored the trials of {user}.")

    modes: Dict[FeatureMode, ModeResult] = {}
    for mode, trials in scored.items():
        result = ModeResult(mode, 0.0, 0.0, 0.0, trials)
        threshold, eer = calibrate_threshold(
            result.genuine_scores(), result.attack_scores()
        )
        result.threshold, result.eer = threshold, eer
        result.accuracy = accuracy_at(
            threshold, result.genuine_scores(), result.attack_scores()
        )
        modes[mode] = result
        logger.info(
            f"{mode.value}: EER {eer:.3f} at threshold {threshold:.4f}, accuracy "
            f"{result.accuracy:.3f}."
        )

    per_user: Dict[str, Tuple[float, float]] = {}
    primary = modes.get(config.mode)
    if primary is not None:
        for user in sorted(by_user):
            genuine = primary.genuine_scores(user)
            attack = primary.attack_scores(user)
            if genuine and attack:
                per_user[user] = calibrate_threshold(genuine, attack)
    return EvaluationResult(modes, profiles, per_user)
