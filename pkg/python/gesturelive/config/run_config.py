"""
Contain the `RunConfig` type and its loading.

Values are layered with a fixed precedence: the defaults below, then a TOML file whose
keys are named exactly as the fields, then command-line flags. Unknown keys in the file
are rejected rather than silently ignored.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Tuple
import logging

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

# 3rd party imports
import pywt

# Our imports
from gesturelive.config import ConfigError
from gesturelive.features import ContourError
from gesturelive.features.contours import BandLayout
from gesturelive.matching.decision import FeatureMode

logger = logging.getLogger(__name__)

Band = Tuple[float, float]


@dataclass(frozen=True)
class RunConfig:
    """
    Every tunable of the pipeline, the simulator and the command-line tools.

    The defaults reproduce the reference processing chain: a 20 kHz probe, 250 ms
    Hann windows every 10 ms zero-padded to 1 Hz bins, the three energy levels and
    five offset bands, a 3-level db4 wavelet with a unit threshold multiplier and a
    one-way Doppler factor.
    """

    sample_rate: float = 48000.0
    probe_f0: float = 20000.0
    probe_amplitude: float = 1.0
    stft_window_s: float = 0.25
    stft_hop_s: float = 0.01
    stft_bin_width_hz: float = 1.0
    energy_levels: Tuple[Band, ...] = ((0.4, 0.7), (0.7, 0.9), (0.95, 0.99))
    freq_bands: Tuple[Band, ...] = (
        (100.0, 200.0),
        (50.0, 100.0),
        (-50.0, 50.0),
        (-100.0, -50.0),
        (-200.0, -100.0),
    )
    carrier_exclusion_hz: float = 2.0
    wavelet: str = "db4"
    wavelet_multiplier: float = 1.0
    wavelet_levels: int = 3
    wavelet_mode: str = "symmetric"
    doppler_factor_k: float = 1.0
    speed_of_sound: float = 343.0
    feature_mode: str = FeatureMode.COMBINED.value
    threshold: float = 0.5
    profile_store_path: str = "profiles"
    seed: int = 0
    array_radius_m: float = 0.043
    pause_labels: Tuple[str, ...] = ("sil", "sp", "pau", "")
    energy_frame_ms: float = 20.0
    energy_threshold_ratio: float = 0.25
    min_trials: int = 3

    def __post_init__(self):
        """Coerce sequence fields to tuples and validate every value."""
        object.__setattr__(
            self, "energy_levels", tuple(_band(b) for b in self.energy_levels)
        )
        object.__setattr__(self, "freq_bands", tuple(_band(b) for b in self.freq_bands))
        object.__setattr__(self, "pause_labels", tuple(str(p) for p in self.pause_labels))
        self._validate()

    def _validate(self):
        positive = (
            "sample_rate",
            "probe_f0",
            "stft_window_s",
            "stft_hop_s",
            "stft_bin_width_hz",
            "speed_of_sound",
            "doppler_factor_k",
            "array_radius_m",
            "energy_frame_ms",
            "energy_threshold_ratio",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}.")
        if not -1.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must be in [-1, 1], got {self.threshold}.")
        if self.wavelet_multiplier < 0 or self.carrier_exclusion_hz < 0:
            raise ConfigError(
                "wavelet_multiplier and carrier_exclusion_hz must be non-negative."
            )
        if self.wavelet_levels < 1 or self.min_trials < 2 or self.seed < 0:
            raise ConfigError(
                "wavelet_levels must be >= 1, min_trials >= 2 and seed >= 0."
            )
        if self.wavelet not in pywt.wavelist(kind="discrete"):
            raise ConfigError(f"Unknown discrete wavelet '{self.wavelet}'.")
        if self.wavelet_mode not in pywt.Modes.modes:
            raise ConfigError(f"Unknown wavelet extension mode '{self.wavelet_mode}'.")
        try:
            FeatureMode(self.feature_mode)
        except ValueError:
            raise ConfigError(
                f"feature_mode must be one of {[m.value for m in FeatureMode]}, got "
                f"'{self.feature_mode}'."
            ) from None
        try:
            self.band_layout()
        except ContourError as ex:
            raise ConfigError(f"Invalid band edges: {ex}") from ex

    @property
    def mode(self) -> FeatureMode:
        """Return the feature mode as an enum."""
        return FeatureMode(self.feature_mode)

    def band_layout(self) -> BandLayout:
        """Return the band edges of both feature families."""
        return BandLayout(self.energy_levels, self.freq_bands)  # type: ignore[arg-type]

    def with_overrides(self, overrides: Mapping[str, Any]) -> RunConfig:
        """
        Return a copy with the given fields replaced; None values are skipped.

        :raises ConfigError if a key is not a field.
        """
        _check_keys(overrides.keys(), "overrides")
        values = {k: v for k, v in overrides.items() if v is not None}
        try:
            return replace(self, **values)
        except TypeError as ex:
            raise ConfigError(f"Invalid configuration value: {ex}") from ex


def _band(value: Any) -> Band:
    try:
        low, high = value
        return float(low), float(high)
    except (TypeError, ValueError):
        raise ConfigError(f"A band must be a [low, high] pair, got {value!r}.") from None


def _check_keys(keys: Any, source: str):
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(keys) - known)
    if unknown:
        raise ConfigError(f"Unknown configuration keys in {source}: {unknown}.")


def read_config_file(path: Path | str) -> Dict[str, Any]:
    """
    Read a TOML configuration file into a field-name mapping.

    :raises ConfigError if the file is unreadable, not TOML or holds unknown keys.
    """
    try:
        with open(path, "rb") as handle:
            document = tomllib.load(handle)
    except OSError as ex:
        raise ConfigError(f"Cannot read configuration file {path}: {ex}") from ex
    except tomllib.TOMLDecodeError as ex:
        raise ConfigError(f"Configuration file {path} is not valid TOML: {ex}") from ex
    _check_keys(document.keys(), str(path))
    return document


def load_run_config(
    path: Path | str | None = None, overrides: Mapping[str, Any] | None = None
) -> RunConfig:
    """
    Build the run configuration from defaults, an optional file and overrides.

    :param path: A TOML file, or None.
    :param overrides: Field values from the command line; None values are skipped.

    :returns The configuration.

    :raises ConfigError on unknown keys or invalid values.
    """
    config = RunConfig()
    if path is not None:
        config = config.with_overrides(read_config_file(path))
        logger.debug(f"Loaded configuration file {path}.")
    if overrides:
        config = config.with_overrides(overrides)
    return config
