"""
Wire the processing stages from a recording to contours, profiles and verdicts.

A recording is beamformed if it has several channels, split into its voice and probe
bands, segmented into phonemes (from an alignment file, else by voice energy), and
the probe band of every phoneme is turned into Doppler slices. The slices are
energy-normalized, turned into the 11 contours and denoised.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple
import logging

# Our imports
from gesturelive.beamform.das import delay_and_sum, steer_search
from gesturelive.beamform.geometry import (
    ArrayGeometry,
    SteeringDirection,
    circular_array,
)
from gesturelive.config.run_config import RunConfig
from gesturelive.denoise.wavelet import denoise_contour_set
from gesturelive.features import ContourError, DegenerateInputError
from gesturelive.features.contours import ContourSet, build_contour_set
from gesturelive.features.doppler import (
    DOPPLER_HALF_BAND_HZ,
    DopplerSlice,
    extract_doppler,
    normalize_energy,
    normalize_length,
)
from gesturelive.matching.decision import (
    LivenessDecision,
    decide,
    score_text_dependent,
    score_text_independent,
)
from gesturelive.matching.profile import DEFAULT_PASSPHRASE, ProfileMode, UserProfile
from gesturelive.matching.templates import (
    PhonemeTemplate,
    build_passphrase_template,
    build_phoneme_templates,
)
from gesturelive.segmentation.alignment import load_alignment
from gesturelive.segmentation.energy import segment_by_energy
from gesturelive.segmentation.utterance import (
    DEFAULT_PAUSE_LABELS,
    SegmentedUtterance,
    remove_pauses,
)
from gesturelive.signal.audio import AudioBuffer, read_wav
from gesturelive.signal.filters import split_bands
from gesturelive.signal.stft import stft

logger = logging.getLogger(__name__)

ALIGNMENT_SUFFIX = ".align.csv"

# Margin kept around the Doppler band so the band edges sit on whole bins.
_BAND_MARGIN_HZ = 5.0


@dataclass(frozen=True)
class Analysis:
    """The contours of one recording and what they were computed from."""

    contours: ContourSet
    utterance: SegmentedUtterance
    slices: Tuple[DopplerSlice, ...]
    dropped_labels: Tuple[str, ...]


def alignment_path_for(wav_path: Path | str) -> Path:
    """Return the alignment file expected next to a recording."""
    path = Path(wav_path)
    return path.with_name(path.stem + ALIGNMENT_SUFFIX)


def default_geometry(config: RunConfig) -> ArrayGeometry:
    """Return the seven-microphone circular array described by the configuration."""
    return circular_array(config.array_radius_m, speed_of_sound=config.speed_of_sound)


def to_mono(
    buffer: AudioBuffer,
    config: RunConfig,
    geometry: ArrayGeometry | None = None,
    direction: SteeringDirection | None = None,
) -> AudioBuffer:
    """
    Reduce a recording to one channel, beamforming when it has several.

    Without a direction, the azimuth with the most beam power is used.
    """
    if buffer.channel_count == 1:
        return buffer
    geometry = geometry or default_geometry(config)
    if direction is None:
        direction, _ = steer_search(buffer, geometry)
        logger.info(f"Steering the array toward azimuth {direction.azimuth:.0f} deg.")
    return delay_and_sum(buffer, geometry, direction)


def load_utterance(
    wav_path: Path | str,
    duration_s: float,
    use_alignment: bool = True,
    pause_labels: Iterable[str] = DEFAULT_PAUSE_LABELS,
) -> SegmentedUtterance | None:
    """Load the alignment next to a recording, or return None if there is none."""
    path = alignment_path_for(wav_path)
    if not use_alignment or not path.is_file():
        return None
    return load_alignment(path, duration_s, pause_labels)


def analyze(
    buffer: AudioBuffer,
    config: RunConfig,
    utterance: SegmentedUtterance | None = None,
    frames_per_phoneme: Sequence[int] | None = None,
) -> Analysis:
    """
    Compute the denoised contour set of a single-channel recording.

    :param buffer: The recording.
    :param config: The run configuration.
    :param utterance: The phoneme alignment; the energy segmenter runs when None.
    :param frames_per_phoneme: Target frame counts; when the phoneme count matches,
      every slice is length-normalized to them before the contours are built.

    :returns The analysis.

    :raises ContourError if no phoneme yields a usable slice.
    """
    if buffer.channel_count > 1:
        buffer = buffer.first_channel()
    voice, probe = split_bands(buffer)
    if utterance is None:
        utterance = segment_by_energy(
            voice, config.energy_frame_ms, config.energy_threshold_ratio
        )
        logger.info(
            f"No alignment given; the energy segmenter found {len(utterance)} segments."
        )
    phonemes = remove_pauses(utterance, config.pause_labels)
    half_band = DOPPLER_HALF_BAND_HZ + _BAND_MARGIN_HZ
    spectrogram = stft(
        probe,
        config.stft_window_s,
        config.stft_hop_s,
        config.stft_bin_width_hz,
        freq_range=(config.probe_f0 - half_band, config.probe_f0 + half_band),
    )
    raw = extract_doppler(
        spectrogram, phonemes, config.probe_f0, config.carrier_exclusion_hz
    )
    dropped = [s.label for s in phonemes.segments]
    slices: List[DopplerSlice] = []
    for doppler in raw:
        try:
            slices.append(normalize_energy(doppler))
        except DegenerateInputError as ex:
            logger.warning(f"Slice dropped: {ex}")
    for doppler in slices:
        dropped.remove(doppler.phoneme_label)
    if not slices:
        raise ContourError("No phoneme of the recording yields a usable Doppler slice.")
    if frames_per_phoneme is not None and len(frames_per_phoneme) == len(slices):
        slices = [
            normalize_length(s, n) if s.frame_count >= 2 and n >= 2 else s
            for s, n in zip(slices, frames_per_phoneme)
        ]
    contours = build_contour_set(slices, config.band_layout())
    if contours.length >= 2**config.wavelet_levels:
        contours = denoise_contour_set(
            contours,
            config.wavelet_multiplier,
            config.wavelet_levels,
            config.wavelet,
            config.wavelet_mode,
        )
    else:
        logger.warning(
            f"Contours of {contours.length} frames are too short to denoise; kept as is."
        )
    return Analysis(contours, utterance, tuple(slices), tuple(dropped))


def analyze_file(
    wav_path: Path | str,
    config: RunConfig,
    use_alignment: bool = True,
    geometry: ArrayGeometry | None = None,
    direction: SteeringDirection | None = None,
    frames_per_phoneme: Sequence[int] | None = None,
) -> Analysis:
    """Read a recording with its alignment, if any, and analyze it."""
    buffer = to_mono(read_wav(wav_path), config, geometry, direction)
    utterance = load_utterance(
        wav_path, buffer.duration_seconds, use_alignment, config.pause_labels
    )
    return analyze(buffer, config, utterance, frames_per_phoneme)


def build_profile(
    user_id: str,
    mode: ProfileMode,
    trials: Sequence[ContourSet],
    config: RunConfig,
) -> Tuple[UserProfile, List[str]]:
    """
    Build a user profile from the contour sets of the enrollment recordings.

    :returns A tuple of the profile and the phoneme labels left out of it.

    :raises EnrollmentError if the trials cannot form a template.
    """
    if mode is ProfileMode.TEXT_DEPENDENT:
        template = build_passphrase_template(trials, config.min_trials)
        profile = UserProfile(
            user_id,
            mode,
            config.threshold,
            passphrase_templates={DEFAULT_PASSPHRASE: template},
        )
        return profile, []
    templates: Dict[str, PhonemeTemplate]
    templates, excluded = build_phoneme_templates(trials)
    profile = UserProfile(
        user_id, mode, config.threshold, phoneme_templates=templates
    )
    return profile, excluded


def verify(
    profile: UserProfile, contours: ContourSet, config: RunConfig
) -> LivenessDecision:
    """Score a test contour set against a profile and decide on its liveness."""
    if profile.mode is ProfileMode.TEXT_DEPENDENT:
        score = score_text_dependent(contours, profile.primary_passphrase(), config.mode)
    else:
        score = score_text_independent(contours, profile.phoneme_templates, config.mode)
    return decide(score, profile.threshold)


def target_frames(profile: UserProfile) -> Tuple[int, ...] | None:
    """Return the per-phoneme frame counts test slices are normalized to."""
    if profile.mode is ProfileMode.TEXT_DEPENDENT:
        return profile.primary_passphrase().contours.frames_per_phoneme
    return None
