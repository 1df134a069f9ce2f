"""
Contain the synthetic corpus generator.

Every synthetic user gets a base live scene: their own articulator geometry and their
own way of moving through a shared passphrase. From it the generator renders
enrollment and genuine trials with small speed jitter, and attacks:

* playback - a loudspeaker replaying the user, its single diaphragm driven by the
  recording rather than by articulators
* mimicry - another user imitating this user's motion, off by at least 0.04 m/s
* diversity - another user saying the passphrase in their own way (optional)

The corpus is written as `<root>/<user>/<kind>_<index>.wav` with a `.align.csv` and a
`.truth.json` next to each recording, plus a `manifest.csv` at the root. The same
arguments always produce byte-identical files.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import List, Sequence, Tuple
import csv
import json
import logging

# 3rd party imports
import numpy as np

# Our imports
from gesturelive.beamform.geometry import (
    SPEED_OF_SOUND_M_S,
    ArrayGeometry,
    SteeringDirection,
)
from gesturelive.segmentation.alignment import save_alignment
from gesturelive.signal.audio import write_wav
from gesturelive.sim import SimulationError
from gesturelive.sim.array import render_plane_wave
from gesturelive.sim.reflector import DEFAULT_DOPPLER_FACTOR, ReflectorSpec
from gesturelive.sim.scene import (
    SceneKind,
    SceneSpec,
    ScriptStep,
    perturb_scene,
    render_scene,
)

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.csv"
MANIFEST_FIELDS = ("path", "user", "kind", "label")

PASSPHRASE = ("s", "eh", "v", "ax", "n")
TRIAL_JITTER_M_S = 0.01
MIMICRY_JITTER_M_S = 0.04
MIN_SPEED_M_S = 0.02
MAX_SPEED_M_S = 0.2
DEFAULT_NOISE_SNR_DB = 30.0

_PAUSE_S = 0.2
_PHONEME_S = (0.26, 0.34)
# Reflectors turn back toward their rest position once they drift this far.
_MAX_DRIFT_M = 0.02


class TrialKind(Enum):
    """
    The role of a corpus recording.

    Possible values:
      ENROLL: A live enrollment trial.
      GENUINE: A live verification trial.
      PLAYBACK: A loudspeaker replay attack.
      MIMICRY: An impostor imitating the user's articulation.
      DIVERSITY: An impostor speaking the passphrase naturally.
    """

    ENROLL = "enroll"
    GENUINE = "genuine"
    PLAYBACK = "playback"
    MIMICRY = "mimicry"
    DIVERSITY = "diversity"

    @property
    def is_attack(self) -> bool:
        """Return whether recordings of this kind are attacks."""
        return self not in (TrialKind.ENROLL, TrialKind.GENUINE)

    @property
    def label(self) -> str:
        """Return the ground-truth label, live or attack."""
        return "attack" if self.is_attack else "live"


ATTACK_KINDS = (TrialKind.PLAYBACK, TrialKind.MIMICRY, TrialKind.DIVERSITY)


@dataclass(frozen=True)
class ManifestEntry:
    """One corpus recording; path is relative to the corpus root."""

    path: str
    user: str
    kind: TrialKind

    @property
    def label(self) -> str:
        """Return the ground-truth label."""
        return self.kind.label


def _derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def user_name(index: int) -> str:
    """Return the directory name of a synthetic user."""
    return f"user_{index:02d}"


def base_scene(
    seed: int,
    user_index: int,
    probe_f0: float,
    noise_snr_db: float | None,
    doppler_factor_k: float = DEFAULT_DOPPLER_FACTOR,
    speed_of_sound: float = SPEED_OF_SOUND_M_S,
) -> SceneSpec:
    """
    Draw the articulator geometry and passphrase motion of one synthetic user.

    Lips, jaw and tongue analogs get their own angle, distance and reflectivity. Each
    phoneme gives every reflector a speed between 0.02 and 0.2 m/s in a random
    direction, turning back whenever the reflector has drifted too far.
    """
    rng = np.random.default_rng([seed, user_index])
    angle_ranges = ((0.0, 20.0), (20.0, 45.0), (40.0, 65.0))
    reflectors = tuple(
        ReflectorSpec(
            angle_deg=float(rng.uniform(low, high)),
            distance_m=float(rng.uniform(0.25, 0.4)),
            reflectivity=float(rng.uniform(0.3, 1.0)),
        )
        for low, high in angle_ranges
    )
    drift = np.zeros(len(reflectors))
    still = tuple(0.0 for _ in reflectors)
    steps: List[ScriptStep] = [ScriptStep("sil", _PAUSE_S, still)]
    for label in PASSPHRASE:
        duration = float(rng.uniform(*_PHONEME_S))
        magnitudes = rng.uniform(MIN_SPEED_M_S, MAX_SPEED_M_S, len(reflectors))
        signs = np.where(rng.random(len(reflectors)) < 0.5, -1.0, 1.0)
        signs = np.where(np.abs(drift) > _MAX_DRIFT_M, -np.sign(drift), signs)
        speeds = signs * magnitudes
        drift += speeds * duration
        steps.append(ScriptStep(label, duration, tuple(float(v) for v in speeds)))
    steps.append(ScriptStep("sil", _PAUSE_S, still))
    return SceneSpec(
        reflectors=reflectors,
        phoneme_script=tuple(steps),
        probe_f0=probe_f0,
        doppler_factor_k=doppler_factor_k,
        noise_snr_db=noise_snr_db,
        speed_of_sound=speed_of_sound,
    )


def playback_scene(scene: SceneSpec) -> SceneSpec:
    """
    Turn a live scene into its loudspeaker replay.

    The single diaphragm faces the microphone at the reflectors' mean distance. It is
    driven by the replayed recording, so it only moves back and forth at the voice
    frequencies with sub-millimeter excursion; the Doppler sidebands of that motion lie
    outside the probe band and the diaphragm echo is rendered as a stationary
    reflector at f0. Step labels and durations are kept, so the replay has the same
    alignment as the live scene.
    """
    distance = float(np.mean([r.distance_m for r in scene.reflectors]))
    steps = tuple(replace(step, speeds=(0.0,)) for step in scene.phoneme_script)
    return replace(
        scene,
        reflectors=(ReflectorSpec(distance_m=distance),),
        phoneme_script=steps,
        kind=SceneKind.PLAYBACK,
    )


def mimicry_scene(victim: SceneSpec, impostor: SceneSpec, seed: int) -> SceneSpec:
    """Return the impostor's articulators following the victim's script imperfectly."""
    imitation = replace(victim, reflectors=impostor.reflectors)
    return perturb_scene(imitation, MIMICRY_JITTER_M_S, seed)


def _write_entry(
    root: Path,
    user: str,
    kind: TrialKind,
    index: int,
    scene: SceneSpec,
    sample_rate: float,
    array: ArrayGeometry | None,
) -> ManifestEntry:
    rendered = render_scene(scene, sample_rate)
    audio = rendered.audio
    if array is not None:
        audio = render_plane_wave(audio, array, SteeringDirection(0.0, 0.0))
    directory = root / user
    directory.mkdir(parents=True, exist_ok=True)
    stem = f"{kind.value}_{index}"
    write_wav(audio, directory / f"{stem}.wav")
    save_alignment(rendered.utterance, directory / f"{stem}.align.csv")
    (directory / f"{stem}.truth.json").write_text(
        json.dumps(rendered.truth.to_dict(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return ManifestEntry(f"{user}/{stem}.wav", user, kind)


def generate_corpus(
    root: Path | str,
    n_users: int,
    n_trials: int,
    seed: int,
    sample_rate: float = 48000.0,
    n_attacks: int = 1,
    attack_kinds: Sequence[TrialKind] = (TrialKind.PLAYBACK, TrialKind.MIMICRY),
    probe_f0: float = 20000.0,
    noise_snr_db: float | None = DEFAULT_NOISE_SNR_DB,
    array: ArrayGeometry | None = None,
    doppler_factor_k: float = DEFAULT_DOPPLER_FACTOR,
    speed_of_sound: float = SPEED_OF_SOUND_M_S,
) -> List[ManifestEntry]:
    """
    Generate a synthetic corpus of live trials and attacks.

    :param root: The corpus directory; it is created if needed.
    :param n_users: The number of synthetic users, at least 2.
    :param n_trials: Enrollment and genuine trials per user, at least 3 each.
    :param seed: The seed everything is derived from.
    :param sample_rate: The sample rate of the recordings.
    :param n_attacks: Recordings per attack kind and user.
    :param attack_kinds: The attack kinds to render.
    :param probe_f0: The probe frequency.
    :param noise_snr_db: The SNR of the added white noise, or None for none.
    :param array: If given, every recording is rendered as a plane wave across this
      array, channel 0 first.
    :param doppler_factor_k: The Doppler factor of every scene.
    :param speed_of_sound: The speed of sound of every scene, in m/s.

    :returns The manifest entries, in the order they are listed in manifest.csv.
    """
    if n_users < 2 or n_trials < 3:
        raise SimulationError(
            f"A corpus needs at least 2 users and 3 trials, got {n_users} and "
            f"{n_trials}."
        )
    kinds = [TrialKind(k) for k in attack_kinds]
    if any(not k.is_attack for k in kinds):
        raise SimulationError(f"Not attack kinds: {[k.value for k in kinds]}.")
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    bases = [
        base_scene(seed, u, probe_f0, noise_snr_db, doppler_factor_k, speed_of_sound)
        for u in range(n_users)
    ]

    entries: List[ManifestEntry] = []
    for u, base in enumerate(bases):
        user = user_name(u)
        other = bases[(u + 1) % n_users]
        renderings: List[Tuple[TrialKind, int, SceneSpec]] = []
        for live_kind in (TrialKind.ENROLL, TrialKind.GENUINE):
            for i in range(n_trials):
                trial_seed = _derive_seed(seed, u, list(TrialKind).index(live_kind), i)
                scene = perturb_scene(base, TRIAL_JITTER_M_S, trial_seed)
                renderings.append((live_kind, i, replace(scene, noise_seed=trial_seed)))
        for kind in kinds:
            for i in range(n_attacks):
                attack_seed = _derive_seed(seed, u, list(TrialKind).index(kind), i)
                if kind is TrialKind.PLAYBACK:
                    scene = playback_scene(base)
                elif kind is TrialKind.MIMICRY:
                    scene = mimicry_scene(base, other, attack_seed)
                else:
                    scene = perturb_scene(other, TRIAL_JITTER_M_S, attack_seed)
                renderings.append((kind, i, replace(scene, noise_seed=attack_seed)))
        for kind, index, scene in renderings:
            entries.append(
                _write_entry(root, user, kind, index, scene, sample_rate, array)
            )
        logger.info(f"Rendered {len(renderings)} recordings for {user}.")

    write_manifest(root / MANIFEST_NAME, entries)
    return entries


def write_manifest(path: Path | str, entries: Sequence[ManifestEntry]):
    """Write a corpus manifest with columns path, user, kind and label."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(MANIFEST_FIELDS)
        for entry in entries:
            writer.writerow((entry.path, entry.user, entry.kind.value, entry.label))


def read_manifest(path: Path | str) -> List[ManifestEntry]:
    """
    Read a corpus manifest.

    :raises SimulationError if the header or a kind is not recognized.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != MANIFEST_FIELDS:
            raise SimulationError(
                f"Manifest {path} must have the columns {','.join(MANIFEST_FIELDS)}."
            )
        try:
            return [
                ManifestEntry(row["path"], row["user"], TrialKind(row["kind"]))
                for row in reader
            ]
        except ValueError as ex:
            raise SimulationError(f"Manifest {path} has an unknown kind: {ex}") from ex
