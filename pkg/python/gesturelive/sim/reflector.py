"""
Contain the moving reflector model.

A reflector moves radially with a piecewise-constant speed, positive toward the
microphone. Its echo of the probe is a tone whose phase advances with the radial
displacement, so its instantaneous frequency is offset from f0 by k * v * cos(a) * f0 / c,
and whose amplitude falls off as 1 / distance.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass, replace
from typing import Sequence, Tuple

# 3rd party imports
import numpy as np
import numpy.typing as npt

# Our imports
from gesturelive.beamform.geometry import SPEED_OF_SOUND_M_S
from gesturelive.signal import FrequencyAliasingError
from gesturelive.signal.audio import AudioBuffer
from gesturelive.signal.probe import DEFAULT_PROBE_F0_HZ
from gesturelive.sim import SimulationError

DEFAULT_DOPPLER_FACTOR = 1.0
MAX_REFLECTOR_SPEED_M_S = 1.0
# An echo from this distance with reflectivity 1 has unit amplitude.
REFERENCE_DISTANCE_M = 0.05
_MIN_DISTANCE_M = 1e-3

SpeedProfile = Tuple[Tuple[float, float], ...]


@dataclass(frozen=True)
class ReflectorSpec:
    """
    A moving reflector.

    speed_profile is a sequence of (duration_s, speed_m_s) steps played back to back;
    the reflector rests after the last step.
    """

    speed_profile: SpeedProfile = ()
    angle_deg: float = 0.0
    distance_m: float = 0.3
    reflectivity: float = 1.0

    def __post_init__(self):
        """Check speeds, distance and reflectivity."""
        profile = tuple((float(d), float(v)) for d, v in self.speed_profile)
        object.__setattr__(self, "speed_profile", profile)
        if self.distance_m <= 0:
            raise SimulationError(f"Distance must be positive, got {self.distance_m}.")
        if not 0 < self.reflectivity <= 1:
            raise SimulationError(
                f"Reflectivity must be in (0, 1], got {self.reflectivity}."
            )
        for duration, speed in profile:
            if duration < 0:
                raise SimulationError(f"Step duration must be >= 0, got {duration}.")
            if abs(speed) > MAX_REFLECTOR_SPEED_M_S:
                raise SimulationError(
                    f"Speed {speed} m/s exceeds the articulator limit of "
                    f"{MAX_REFLECTOR_SPEED_M_S} m/s."
                )

    @classmethod
    def constant(
        cls,
        speed: float,
        duration: float,
        angle_deg: float = 0.0,
        distance_m: float = 0.3,
        reflectivity: float = 1.0,
    ) -> ReflectorSpec:
        """Build a reflector moving at one speed for the given duration."""
        return cls(((duration, speed),), angle_deg, distance_m, reflectivity)

    def with_profile(self, speed_profile: Sequence[Tuple[float, float]]) -> ReflectorSpec:
        """Return the same reflector driven by another speed profile."""
        return replace(self, speed_profile=tuple(speed_profile))

    def _breakpoints(self) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        durations = np.array([d for d, _ in self.speed_profile], dtype=np.float64)
        speeds = np.array([v for _, v in self.speed_profile], dtype=np.float64)
        return np.concatenate(([0.0], np.cumsum(durations))), speeds

    def speed_at(self, times: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Return the speed at the given times; zero outside the profile."""
        t = np.asarray(times, dtype=np.float64)
        edges, speeds = self._breakpoints()
        if speeds.size == 0:
            return np.zeros_like(t)
        index = np.searchsorted(edges, t, side="right") - 1
        inside = (index >= 0) & (index < speeds.size)
        return np.where(inside, speeds[np.clip(index, 0, speeds.size - 1)], 0.0)

    def radial_displacement(self, times: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Return how far the reflector has moved toward the microphone, in meters."""
        t = np.asarray(times, dtype=np.float64)
        edges, speeds = self._breakpoints()
        if speeds.size == 0:
            return np.zeros_like(t)
        travelled = np.concatenate(([0.0], np.cumsum(speeds * np.diff(edges))))
        # Piecewise-linear in t and flat once the profile ends.
        along = np.interp(t, edges, travelled)
        return along * np.cos(np.deg2rad(self.angle_deg))

    def distance_at(self, times: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Return the reflector distance at the given times."""
        return np.maximum(self.distance_m - self.radial_displacement(times), _MIN_DISTANCE_M)


def doppler_offset_hz(
    speed: float | npt.NDArray[np.float64],
    angle_deg: float,
    f0: float = DEFAULT_PROBE_F0_HZ,
    k: float = DEFAULT_DOPPLER_FACTOR,
    c: float = SPEED_OF_SOUND_M_S,
) -> float | npt.NDArray[np.float64]:
    """Return the Doppler offset k * v * cos(angle) * f0 / c in Hz."""
    return k * speed * np.cos(np.deg2rad(angle_deg)) * f0 / c


def analytic_offsets(
    spec: ReflectorSpec,
    times: npt.ArrayLike,
    f0: float = DEFAULT_PROBE_F0_HZ,
    k: float = DEFAULT_DOPPLER_FACTOR,
    c: float = SPEED_OF_SOUND_M_S,
) -> npt.NDArray[np.float64]:
    """Return the instantaneous Doppler offset of a reflector at the given times."""
    return np.asarray(doppler_offset_hz(spec.speed_at(times), spec.angle_deg, f0, k, c))


def render_reflector(
    spec: ReflectorSpec,
    f0: float,
    duration: float,
    sample_rate: float,
    k: float = DEFAULT_DOPPLER_FACTOR,
    c: float = SPEED_OF_SOUND_M_S,
) -> AudioBuffer:
    """
    Render the echo of the probe tone off one moving reflector.

    s(t) = reflectivity * d_ref / distance(t) * sin(2 pi f0 (t + k x(t) / c)), where
    x(t) is the radial displacement toward the microphone and d_ref = 5 cm.

    :param spec: The reflector.
    :param f0: The probe frequency in Hz.
    :param duration: The duration in seconds.
    :param sample_rate: The sample rate in Hz.
    :param k: The Doppler factor; 1 for one-way, 2 for a monostatic round trip.
    :param c: The speed of sound in m/s.

    :returns The single-channel echo.

    :raises FrequencyAliasingError if f0 is at or above the Nyquist frequency.
    """
    if f0 >= sample_rate / 2:
        raise FrequencyAliasingError(
            f"Probe frequency {f0} Hz aliases at sample rate {sample_rate} Hz."
        )
    if duration <= 0:
        raise SimulationError(f"Duration must be positive, got {duration}.")
    t = np.arange(int(round(duration * sample_rate))) / sample_rate
    displacement = spec.radial_displacement(t)
    amplitude = spec.reflectivity * REFERENCE_DISTANCE_M / spec.distance_at(t)
    phase = 2 * np.pi * f0 * (t + k * displacement / c)
    return AudioBuffer.mono(amplitude * np.sin(phase), sample_rate)
