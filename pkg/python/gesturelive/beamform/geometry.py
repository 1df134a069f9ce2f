"""
Contain microphone array geometries, steering directions and arrival delays.

Coordinates are in meters with the array in the x-y plane. Azimuth is measured from
the +x axis toward +y and elevation from the array plane toward +z.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass
from pathlib import Path
import json
import logging

# 3rd party imports
import numpy as np
import numpy.typing as npt

# Our imports
from gesturelive.beamform import GeometryError

logger = logging.getLogger(__name__)

SPEED_OF_SOUND_M_S = 343.0
DEFAULT_ARRAY_RADIUS_M = 0.043
DEFAULT_RING_SIZE = 6


@dataclass(frozen=True)
class ArrayGeometry:
    """
    The positions of the microphones of an array, channel order.

    Channel 0 is the reference microphone, normally the center one.
    """

    mic_positions: npt.NDArray[np.float64]
    speed_of_sound: float = SPEED_OF_SOUND_M_S

    def __post_init__(self):
        """Check there are at least two distinct 3-D positions."""
        positions = np.array(self.mic_positions, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != 3 or positions.shape[0] < 2:
            raise GeometryError(
                f"An array needs at least 2 three-dimensional positions, got shape "
                f"{positions.shape}."
            )
        if len(np.unique(np.round(positions, 12), axis=0)) != positions.shape[0]:
            raise GeometryError("Microphone positions must be distinct.")
        if not self.speed_of_sound > 0:
            raise GeometryError(
                f"Speed of sound must be positive, got {self.speed_of_sound}."
            )
        positions.flags.writeable = False
        object.__setattr__(self, "mic_positions", positions)

    @property
    def mic_count(self) -> int:
        """Return the number of microphones."""
        return int(self.mic_positions.shape[0])


@dataclass(frozen=True)
class SteeringDirection:
    """A far-field arrival direction in degrees; azimuth is wrapped into [0, 360)."""

    azimuth: float
    elevation: float = 0.0

    def __post_init__(self):
        """Wrap the azimuth and check the elevation."""
        if not -90.0 <= self.elevation <= 90.0:
            raise GeometryError(f"Elevation {self.elevation} is outside [-90, 90].")
        object.__setattr__(self, "azimuth", float(self.azimuth) % 360.0)

    def unit_vector(self) -> npt.NDArray[np.float64]:
        """Return the unit vector pointing toward the source."""
        azimuth = np.deg2rad(self.azimuth)
        elevation = np.deg2rad(self.elevation)
        return np.array(
            [
                np.cos(elevation) * np.cos(azimuth),
                np.cos(elevation) * np.sin(azimuth),
                np.sin(elevation),
            ]
        )


def tdoa(geometry: ArrayGeometry, direction: SteeringDirection) -> npt.NDArray[np.float64]:
    """
    Return the arrival delay of every microphone relative to channel 0, in seconds.

    delay_m = -u . (p_m - p_0) / c, so a microphone closer to the source hears the
    wave first and gets a negative delay.
    """
    relative = geometry.mic_positions - geometry.mic_positions[0]
    delays = -(relative @ direction.unit_vector()) / geometry.speed_of_sound
    delays[0] = 0.0
    return delays


def circular_array(
    radius: float = DEFAULT_ARRAY_RADIUS_M,
    count: int = DEFAULT_RING_SIZE,
    center: bool = True,
    speed_of_sound: float = SPEED_OF_SOUND_M_S,
) -> ArrayGeometry:
    """
    Build a uniform circular array, optionally with a center microphone on channel 0.

    Ring microphone i sits at azimuth 360 * i / count degrees.
    """
    if radius <= 0 or count < 1:
        raise GeometryError(
            f"A circular array needs a positive radius and at least one microphone, got "
            f"radius {radius} and count {count}."
        )
    angles = 2 * np.pi * np.arange(count) / count
    ring = np.column_stack(
        (radius * np.cos(angles), radius * np.sin(angles), np.zeros(count))
    )
    positions = np.vstack((np.zeros((1, 3)), ring)) if center else ring
    return ArrayGeometry(positions, speed_of_sound)


def load_geometry(path: Path | str) -> ArrayGeometry:
    """
    Read an array geometry from a JSON file.

    The document holds `mic_positions`, a list of [x, y, z] triples in meters in
    channel order, and optionally `speed_of_sound`.

    :raises GeometryError if the file cannot be read or is malformed.
    """
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
        positions = np.asarray(document["mic_positions"], dtype=np.float64)
        speed = float(document.get("speed_of_sound", SPEED_OF_SOUND_M_S))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as ex:
        raise GeometryError(f"Cannot load array geometry from {path}: {ex}") from ex
    logger.debug(f"Loaded a {positions.shape[0]}-microphone geometry from {path}.")
    return ArrayGeometry(positions, speed)
