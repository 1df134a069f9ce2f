"""
Contain speaking scenes: reflectors driven by a phoneme script.

A live scene has at least three reflectors standing in for the lips, jaw and tongue;
a playback scene has exactly one, the loudspeaker diaphragm. Every script step names a
phoneme (or a pause), lasts a fixed time and gives each reflector a constant speed.
Rendering adds the direct-path probe tone, a voice-band tone burst per phoneme and,
optionally, white noise.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, List, Tuple
import logging
import zlib

# 3rd party imports
import numpy as np
import numpy.typing as npt
from scipy.signal import windows

# Our imports
from gesturelive.beamform.geometry import SPEED_OF_SOUND_M_S
from gesturelive.segmentation.utterance import (
    DEFAULT_PAUSE_LABELS,
    PhonemeSegment,
    SegmentationSource,
    SegmentedUtterance,
)
from gesturelive.signal.audio import AudioBuffer
from gesturelive.signal.probe import DEFAULT_PROBE_F0_HZ, generate_probe
from gesturelive.signal.stft import DEFAULT_HOP_S, DEFAULT_WINDOW_S
from gesturelive.sim import SimulationError
from gesturelive.sim.reflector import (
    DEFAULT_DOPPLER_FACTOR,
    MAX_REFLECTOR_SPEED_M_S,
    ReflectorSpec,
    analytic_offsets,
    render_reflector,
)

logger = logging.getLogger(__name__)

TRUTH_VERSION = 1
DEFAULT_CARRIER_AMPLITUDE = 0.01
DEFAULT_VOICE_AMPLITUDE = 0.2
MIN_LIVE_REFLECTORS = 3

_VOICE_LOW_HZ = 200.0
_VOICE_SPAN_HZ = 3000.0


class SceneKind(Enum):
    """
    Who produces the utterance.

    Possible values:
      LIVE: A person, several articulators moving together.
      PLAYBACK: A loudspeaker, one diaphragm moving in one dimension.
    """

    LIVE = "live"
    PLAYBACK = "playback"


@dataclass(frozen=True)
class ScriptStep:
    """One phoneme or pause of a script with one speed per reflector."""

    label: str
    duration_s: float
    speeds: Tuple[float, ...]

    def __post_init__(self):
        """Check the duration."""
        object.__setattr__(self, "speeds", tuple(float(v) for v in self.speeds))
        if self.duration_s <= 0:
            raise SimulationError(
                f"Step '{self.label}' must last a positive time, got {self.duration_s}."
            )

    def is_pause(self) -> bool:
        """Return whether the step is a pause rather than a phoneme."""
        return self.label.strip().lower() in DEFAULT_PAUSE_LABELS


@dataclass(frozen=True)
class SceneSpec:
    """
    A speaking scene.

    The reflectors carry the geometry (angle, distance, reflectivity); their motion
    comes from the phoneme script.
    """

    reflectors: Tuple[ReflectorSpec, ...]
    phoneme_script: Tuple[ScriptStep, ...]
    kind: SceneKind = SceneKind.LIVE
    probe_f0: float = DEFAULT_PROBE_F0_HZ
    doppler_factor_k: float = DEFAULT_DOPPLER_FACTOR
    noise_snr_db: float | None = None
    noise_seed: int = 0
    carrier_amplitude: float = DEFAULT_CARRIER_AMPLITUDE
    voice_amplitude: float = DEFAULT_VOICE_AMPLITUDE
    speed_of_sound: float = SPEED_OF_SOUND_M_S

    def __post_init__(self):
        """Check reflector counts and script consistency."""
        reflectors = tuple(self.reflectors)
        script = tuple(self.phoneme_script)
        object.__setattr__(self, "reflectors", reflectors)
        object.__setattr__(self, "phoneme_script", script)
        if self.kind is SceneKind.LIVE and len(reflectors) < MIN_LIVE_REFLECTORS:
            raise SimulationError(
                f"A live scene needs at least {MIN_LIVE_REFLECTORS} reflectors, got "
                f"{len(reflectors)}."
            )
        if self.kind is SceneKind.PLAYBACK and len(reflectors) != 1:
            raise SimulationError(
                f"A playback scene has exactly 1 reflector, got {len(reflectors)}."
            )
        if not script:
            raise SimulationError("A scene needs at least one script step.")
        for step in script:
            if len(step.speeds) != len(reflectors):
                raise SimulationError(
                    f"Step '{step.label}' gives {len(step.speeds)} speeds for "
                    f"{len(reflectors)} reflectors."
                )

    @property
    def duration_s(self) -> float:
        """Return the total script duration."""
        return float(sum(step.duration_s for step in self.phoneme_script))

    def driven_reflectors(self) -> List[ReflectorSpec]:
        """Return the reflectors with their speed profiles taken from the script."""
        return [
            reflector.with_profile(
                [(step.duration_s, step.speeds[index]) for step in self.phoneme_script]
            )
            for index, reflector in enumerate(self.reflectors)
        ]

    def utterance(self, total_duration_s: float | None = None) -> SegmentedUtterance:
        """
        Return the alignment of the script, pauses included.

        :param total_duration_s: The length of the rendered recording. Segment ends
            are clamped to it, since rounding to whole samples can shorten the
            recording by up to half a sample.
        """
        total = self.duration_s if total_duration_s is None else total_duration_s
        segments: List[PhonemeSegment] = []
        start = 0.0
        for step in self.phoneme_script:
            end = min(start + step.duration_s, total)
            if end > start:
                segments.append(PhonemeSegment(step.label, start, end))
            start += step.duration_s
        return SegmentedUtterance(
            tuple(segments), SegmentationSource.EXTERNAL_ALIGNMENT, total
        )


@dataclass(frozen=True)
class SceneTruth:
    """The analytic Doppler offset of every reflector at every STFT frame center."""

    kind: SceneKind
    probe_f0: float
    doppler_factor_k: float
    sample_rate: float
    frame_centers_s: Tuple[float, ...]
    reflectors: Tuple[ReflectorSpec, ...]
    offsets_hz: Tuple[Tuple[float, ...], ...]

    def to_dict(self) -> Dict[str, Any]:
        """Return the JSON document form of the truth record."""
        return {
            "version": TRUTH_VERSION,
            "kind": self.kind.value,
            "probe_f0_hz": self.probe_f0,
            "doppler_factor_k": self.doppler_factor_k,
            "sample_rate": self.sample_rate,
            "frame_centers_s": list(self.frame_centers_s),
            "reflectors": [
                {
                    "angle_deg": r.angle_deg,
                    "distance_m": r.distance_m,
                    "reflectivity": r.reflectivity,
                    "offsets_hz": list(offsets),
                }
                for r, offsets in zip(self.reflectors, self.offsets_hz)
            ],
        }


@dataclass(frozen=True)
class RenderedScene:
    """A rendered recording with its alignment and analytic truth."""

    audio: AudioBuffer
    utterance: SegmentedUtterance
    truth: SceneTruth


def reflector_timeline(
    scene: SceneSpec,
    sample_rate: float,
    window_len: float = DEFAULT_WINDOW_S,
    hop: float = DEFAULT_HOP_S,
) -> SceneTruth:
    """Return the analytic offsets of the scene's reflectors at the STFT frame centers."""
    length = int(round(scene.duration_s * sample_rate))
    window = int(round(window_len * sample_rate))
    step = max(1, int(round(hop * sample_rate)))
    count = max(0, (length - window) // step + 1)
    centers = (step * np.arange(count) + window / 2) / sample_rate
    driven = scene.driven_reflectors()
    offsets = tuple(
        tuple(
            float(v)
            for v in analytic_offsets(
                r, centers, scene.probe_f0, scene.doppler_factor_k, scene.speed_of_sound
            )
        )
        for r in driven
    )
    return SceneTruth(
        scene.kind,
        scene.probe_f0,
        scene.doppler_factor_k,
        float(sample_rate),
        tuple(float(t) for t in centers),
        tuple(driven),
        offsets,
    )


def voice_burst_frequency(label: str) -> float:
    """Return the stable voice-band frequency that stands in for a phoneme."""
    return _VOICE_LOW_HZ + float(zlib.crc32(label.encode("utf-8")) % int(_VOICE_SPAN_HZ))


def _voice_track(scene: SceneSpec, length: int, sample_rate: float) -> npt.NDArray[np.float64]:
    track = np.zeros(length)
    start = 0.0
    for step in scene.phoneme_script:
        first = int(round(start * sample_rate))
        last = min(length, int(round((start + step.duration_s) * sample_rate)))
        start += step.duration_s
        if step.is_pause() or last <= first:
            continue
        t = np.arange(last - first) / sample_rate
        envelope = windows.tukey(last - first, alpha=0.2)
        frequency = voice_burst_frequency(step.label)
        track[first:last] += (
            scene.voice_amplitude * envelope * np.sin(2 * np.pi * frequency * t)
        )
    return track


def render_scene(scene: SceneSpec, sample_rate: float) -> RenderedScene:
    """
    Render a scene to a single-channel recording.

    The recording is the sum of the reflector echoes, the direct-path probe, the voice
    bursts and, when noise_snr_db is set, seeded white noise at that SNR relative to
    the noiseless mix.

    :param scene: The scene.
    :param sample_rate: The sample rate in Hz.

    :returns The recording, its alignment (pauses included) and the truth record.
    """
    duration = scene.duration_s
    length = int(round(duration * sample_rate))
    mix = np.zeros(length)
    for reflector in scene.driven_reflectors():
        echo = render_reflector(
            reflector,
            scene.probe_f0,
            duration,
            sample_rate,
            scene.doppler_factor_k,
            scene.speed_of_sound,
        )
        mix += echo.data()
    if scene.carrier_amplitude > 0:
        carrier = generate_probe(
            sample_rate, scene.probe_f0, duration, scene.carrier_amplitude
        )
        mix += carrier.data()
    if scene.voice_amplitude > 0:
        mix += _voice_track(scene, length, sample_rate)
    if scene.noise_snr_db is not None:
        power = float(np.mean(mix**2)) if length else 0.0
        sigma = np.sqrt(power / 10 ** (scene.noise_snr_db / 10.0))
        mix += np.random.default_rng(scene.noise_seed).normal(0.0, sigma, length)
    return RenderedScene(
        AudioBuffer.mono(mix, sample_rate),
        scene.utterance(length / sample_rate),
        reflector_timeline(scene, sample_rate),
    )


def perturb_scene(scene: SceneSpec, speed_jitter: float, seed: int) -> SceneSpec:
    """
    Offset the speeds of a scene by seeded amounts within +/- speed_jitter.

    Every phoneme step and reflector draws its own offset; the draws are scaled so the
    largest offset is exactly speed_jitter. Pause steps keep their speeds. Speeds stay
    within the articulator limit.

    :param scene: The scene to perturb.
    :param speed_jitter: The largest offset in m/s; 0 returns the scene unchanged.
    :param seed: The seed of the offsets.

    :returns The perturbed scene.
    """
    if speed_jitter < 0:
        raise SimulationError(f"Speed jitter must be >= 0, got {speed_jitter}.")
    if speed_jitter == 0:
        return scene
    moving = [i for i, step in enumerate(scene.phoneme_script) if not step.is_pause()]
    rng = np.random.default_rng(seed)
    draws = rng.uniform(-1.0, 1.0, size=(len(moving), len(scene.reflectors)))
    peak = float(np.max(np.abs(draws))) if draws.size else 0.0
    if peak > 0:
        draws /= peak
    script = list(scene.phoneme_script)
    for row, index in enumerate(moving):
        step = script[index]
        speeds = np.clip(
            np.asarray(step.speeds) + speed_jitter * draws[row],
            -MAX_REFLECTOR_SPEED_M_S,
            MAX_REFLECTOR_SPEED_M_S,
        )
        script[index] = replace(step, speeds=tuple(float(v) for v in speeds))
    return replace(scene, phoneme_script=tuple(script))
