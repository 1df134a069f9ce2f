"""
Contain the 11 contour features and the `ContourSet` that carries them.

Six energy-band frequency contours follow the magnitude-weighted centroid offset of
the bins in one of three normalized-energy levels, split by the sign of the offset.
Five frequency-band energy contours follow the mean normalized energy inside fixed
offset bands. Contours of consecutive phonemes are spliced in utterance order.

Band names are fixed:

* eb1/eb2 - low level (0.4-0.7), positive/negative offsets
* eb3/eb4 - middle level (0.7-0.9), positive/negative offsets
* eb5/eb6 - top level (0.95-0.99), positive/negative offsets
* fb1 = [100, 200) Hz, fb2 = [50, 100), fb3 = [-50, 50), fb4 = [-100, -50),
  fb5 = [-200, -100)
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple
import json

# 3rd party imports
import numpy as np
import numpy.typing as npt

# Our imports
from gesturelive.features import ContourError
from gesturelive.features.doppler import DopplerSlice, resample_frames

CONTOUR_SET_VERSION = 1

ENERGY_BAND_NAMES = ("eb1", "eb2", "eb3", "eb4", "eb5", "eb6")
FREQ_BAND_NAMES = ("fb1", "fb2", "fb3", "fb4", "fb5")
CONTOUR_NAMES = ENERGY_BAND_NAMES + FREQ_BAND_NAMES

ENERGY_CONTOUR_COUNT = len(ENERGY_BAND_NAMES)
FREQ_CONTOUR_COUNT = len(FREQ_BAND_NAMES)
CONTOUR_COUNT = len(CONTOUR_NAMES)

Band = Tuple[float, float]


@dataclass(frozen=True)
class BandLayout:
    """
    The band edges of both feature families, each band [low, high).

    energy_levels lists the low, middle and top normalized-energy levels;
    freq_bands lists the offset bands fb1 to fb5 in Hz.
    """

    energy_levels: Tuple[Band, Band, Band] = ((0.4, 0.7), (0.7, 0.9), (0.95, 0.99))
    freq_bands: Tuple[Band, Band, Band, Band, Band] = (
        (100.0, 200.0),
        (50.0, 100.0),
        (-50.0, 50.0),
        (-100.0, -50.0),
        (-200.0, -100.0),
    )

    def __post_init__(self):
        """Check band counts and ordering."""
        if len(self.energy_levels) != 3 or len(self.freq_bands) != 5:
            raise ContourError(
                f"Expected 3 energy levels and 5 frequency bands, got "
                f"{len(self.energy_levels)} and {len(self.freq_bands)}."
            )
        for low, high in (*self.energy_levels, *self.freq_bands):
            if not low < high:
                raise ContourError(f"Band [{low}, {high}) is empty.")


DEFAULT_BAND_LAYOUT = BandLayout()


def _require_energy_normalized(doppler: DopplerSlice):
    if not doppler.normalized_energy:
        raise ContourError(
            f"Slice '{doppler.phoneme_label}' must be energy-normalized before contour "
            "extraction."
        )


def energy_band_contours(
    doppler: DopplerSlice, layout: BandLayout = DEFAULT_BAND_LAYOUT
) -> npt.NDArray[np.float64]:
    """
    Compute the six energy-band frequency contours of a slice.

    For each frame and band, the centroid is the magnitude-weighted mean offset of
    the bins whose normalized magnitude lies in the band's level and whose offset has
    the band's sign. Offset 0 belongs to neither sign. A band with no such bin emits
    0 Hz.

    :param doppler: An energy-normalized slice.
    :param layout: The band edges.

    :returns A (6, frames) matrix ordered eb1 to eb6.
    """
    _require_energy_normalized(doppler)
    offsets = doppler.offsets_hz()
    magnitudes = np.where(doppler.carrier_mask(), 0.0, doppler.magnitudes)
    contours = np.zeros((ENERGY_CONTOUR_COUNT, doppler.frame_count))
    signs = (offsets > 0, offsets < 0)
    for level, (low, high) in enumerate(layout.energy_levels):
        in_level = (magnitudes >= low) & (magnitudes < high)
        for side, sign_mask in enumerate(signs):
            weights = np.where(in_level & sign_mask[np.newaxis, :], magnitudes, 0.0)
            total = weights.sum(axis=1)
            weighted = weights @ offsets
            safe_total = np.where(total > 0, total, 1.0)
            contours[2 * level + side] = np.where(total > 0, weighted / safe_total, 0.0)
    return contours


def freq_band_energy_contours(
    doppler: DopplerSlice, layout: BandLayout = DEFAULT_BAND_LAYOUT
) -> npt.NDArray[np.float64]:
    """
    Compute the five frequency-band energy contours of a slice.

    Each value is the mean normalized magnitude of the band's bins in that frame,
    carrier-excluded bins left out.

    :param doppler: An energy-normalized slice.
    :param layout: The band edges.

    :returns A (5, frames) matrix ordered fb1 to fb5.
    """
    _require_energy_normalized(doppler)
    offsets = doppler.offsets_hz()
    kept = ~doppler.carrier_mask()
    contours = np.zeros((FREQ_CONTOUR_COUNT, doppler.frame_count))
    for index, (low, high) in enumerate(layout.freq_bands):
        in_band = kept & (offsets >= low) & (offsets < high)
        if in_band.any():
            contours[index] = doppler.magnitudes[:, in_band].mean(axis=1)
    return contours


def phoneme_contours(
    doppler: DopplerSlice, layout: BandLayout = DEFAULT_BAND_LAYOUT
) -> npt.NDArray[np.float64]:
    """Return the (11, frames) contour block of one slice, eb1 to fb5."""
    return np.vstack(
        (energy_band_contours(doppler, layout), freq_band_energy_contours(doppler, layout))
    )


@dataclass(frozen=True)
class ContourSet:
    """
    The 11 contours of one utterance.

    All contours share the length sum(frames_per_phoneme). `values` is the (11, T)
    matrix whose rows are eb1 to eb6 followed by fb1 to fb5.
    """

    values: npt.NDArray[np.float64]
    frames_per_phoneme: Tuple[int, ...]
    phoneme_labels: Tuple[str, ...]
    f0_hz: float
    bin_width_hz: float

    def __post_init__(self):
        """Validate the shape against the per-phoneme frame counts."""
        values = np.array(self.values, dtype=np.float64)
        frames = tuple(int(n) for n in self.frames_per_phoneme)
        labels = tuple(str(label) for label in self.phoneme_labels)
        if values.ndim != 2 or values.shape[0] != CONTOUR_COUNT:
            raise ContourError(
                f"A contour set needs {CONTOUR_COUNT} contours, got shape {values.shape}."
            )
        if sum(frames) != values.shape[1] or any(n < 1 for n in frames):
            raise ContourError(
                f"Frame counts {list(frames)} do not add up to the contour length "
                f"{values.shape[1]}."
            )
        if len(labels) != len(frames):
            raise ContourError(
                f"{len(labels)} labels given for {len(frames)} phoneme blocks."
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "frames_per_phoneme", frames)
        object.__setattr__(self, "phoneme_labels", labels)

    @property
    def length(self) -> int:
        """Return the common length of the contours."""
        return int(self.values.shape[1])

    @property
    def energy_band_freq(self) -> npt.NDArray[np.float64]:
        """Return the six energy-band frequency contours."""
        return self.values[:ENERGY_CONTOUR_COUNT]

    @property
    def freq_band_energy(self) -> npt.NDArray[np.float64]:
        """Return the five frequency-band energy contours."""
        return self.values[ENERGY_CONTOUR_COUNT:]

    def contour(self, name: str) -> npt.NDArray[np.float64]:
        """Return one contour by its band name."""
        try:
            return self.values[CONTOUR_NAMES.index(name)]
        except ValueError:
            raise ContourError(f"Unknown contour '{name}'.") from None

    def blocks(self) -> List[npt.NDArray[np.float64]]:
        """Split the contours back into one (11, frames) block per phoneme."""
        boundaries = np.cumsum(self.frames_per_phoneme)[:-1]
        return list(np.split(self.values, boundaries, axis=1))

    def with_values(self, values: npt.ArrayLike) -> ContourSet:
        """Return a copy with new contour values and the same phoneme layout."""
        return ContourSet(
            np.asarray(values, dtype=np.float64),
            self.frames_per_phoneme,
            self.phoneme_labels,
            self.f0_hz,
            self.bin_width_hz,
        )

    @classmethod
    def from_blocks(
        cls,
        blocks: Sequence[npt.ArrayLike],
        labels: Sequence[str],
        f0_hz: float,
        bin_width_hz: float,
    ) -> ContourSet:
        """Splice per-phoneme (11, frames) blocks into a contour set."""
        if not blocks:
            raise ContourError("A contour set needs at least one phoneme block.")
        arrays = [np.asarray(b, dtype=np.float64) for b in blocks]
        return cls(
            np.hstack(arrays),
            tuple(a.shape[1] for a in arrays),
            tuple(labels),
            f0_hz,
            bin_width_hz,
        )


def build_contour_set(
    slices: Sequence[DopplerSlice], layout: BandLayout = DEFAULT_BAND_LAYOUT
) -> ContourSet:
    """
    Compute the contours of every slice and splice them in utterance order.

    :param slices: Energy-normalized slices, one per phoneme.
    :param layout: The band edges.

    :returns The contour set.

    :raises ContourError if there are no slices or one is not energy-normalized.
    """
    if not slices:
        raise ContourError("Cannot build a contour set from an empty slice list.")
    return ContourSet.from_blocks(
        [phoneme_contours(s, layout) for s in slices],
        [s.phoneme_label for s in slices],
        slices[0].f0,
        slices[0].bin_width_hz,
    )


def contour_set_to_dict(contours: ContourSet) -> Dict[str, Any]:
    """Return the versioned document form of a contour set."""
    return {
        "version": CONTOUR_SET_VERSION,
        "f0_hz": contours.f0_hz,
        "bin_width_hz": contours.bin_width_hz,
        "frames_per_phoneme": list(contours.frames_per_phoneme),
        "phoneme_labels": list(contours.phoneme_labels),
        "contours": {
            name: contours.values[index].tolist()
            for index, name in enumerate(CONTOUR_NAMES)
        },
    }


def contour_set_from_dict(document: Dict[str, Any]) -> ContourSet:
    """
    Rebuild a contour set from its document form.

    :raises ContourError if the version is unsupported or a field is missing.
    """
    version = document.get("version")
    if version != CONTOUR_SET_VERSION:
        raise ContourError(f"Unsupported contour set version {version!r}.")
    try:
        named = document["contours"]
        values = np.array([named[name] for name in CONTOUR_NAMES], dtype=np.float64)
        frames = tuple(int(n) for n in document["frames_per_phoneme"])
        labels = tuple(
            document.get("phoneme_labels", [f"seg_{i}" for i in range(len(frames))])
        )
        return ContourSet(
            values, frames, labels, float(document["f0_hz"]), float(document["bin_width_hz"])
        )
    except (KeyError, TypeError, ValueError) as ex:
        raise ContourError(f"Malformed contour set document: {ex}") from ex


def contour_set_to_json(contours: ContourSet) -> str:
    """Serialize a contour set to JSON with sorted keys."""
    return json.dumps(contour_set_to_dict(contours), sort_keys=True, indent=2)


def contour_set_from_json(text: str) -> ContourSet:
    """Parse a contour set from JSON."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as ex:
        raise ContourError(f"Contour set is not valid JSON: {ex}") from ex
    return contour_set_from_dict(document)


def resample_block(
    block: npt.NDArray[np.float64], target_frames: int
) -> npt.NDArray[np.float64]:
    """
    Resample an (11, frames) block to target_frames frames by linear interpolation.

    A single-frame block is repeated and a single-frame target takes the block mean.
    """
    frames = int(block.shape[1])
    if target_frames < 1:
        raise ContourError(f"Cannot resample a block to {target_frames} frames.")
    if frames == target_frames:
        return np.array(block, dtype=np.float64)
    if frames == 1:
        return np.repeat(block, target_frames, axis=1)
    if target_frames == 1:
        return block.mean(axis=1, keepdims=True)
    return resample_frames(block.T, target_frames).T


def align_contour_set(
    contours: ContourSet, frames_per_phoneme: Sequence[int]
) -> ContourSet:
    """
    Resample every phoneme block of a set to the given frame counts.

    :raises ContourError if the number of phonemes differs.
    """
    targets = tuple(int(n) for n in frames_per_phoneme)
    if len(targets) != len(contours.frames_per_phoneme):
        raise ContourError(
            f"Cannot align {len(contours.frames_per_phoneme)} phoneme blocks to "
            f"{len(targets)}."
        )
    blocks = [resample_block(b, n) for b, n in zip(contours.blocks(), targets)]
    return ContourSet.from_blocks(
        blocks, contours.phoneme_labels, contours.f0_hz, contours.bin_width_hz
    )
