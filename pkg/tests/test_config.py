"""Tests for the layered run configuration and the logging configuration."""

# Python imports
import logging

# 3rd party imports
import pytest

# Our imports
from gesturelive.config import ConfigError
from gesturelive.config.environ import CONFIG_PATH_ENV_VAR, get_environ_config_path
from gesturelive.config.run_config import RunConfig, load_run_config, read_config_file
from gesturelive.logging.config import (
    LOG_FORMAT_ENV_VAR,
    LOG_LEVEL_ENV_VAR,
    _build_logging_config,
    get_logging_env_vars,
)
from gesturelive.matching.decision import FeatureMode


# ---------------------------------------------------------------------------
# Defaults
# ---------------------------------------------------------------------------


class TestDefaults:
    def test_reference_chain(self, config):
        assert config.sample_rate == 48000.0
        assert config.probe_f0 == 20000.0
        assert config.stft_window_s == 0.25
        assert config.stft_hop_s == 0.01
        assert config.wavelet == "db4"
        assert config.wavelet_levels == 3
        assert config.threshold == 0.5
        assert config.mode is FeatureMode.COMBINED

    def test_band_layout(self, config):
        layout = config.band_layout()
        assert layout.energy_levels == ((0.4, 0.7), (0.7, 0.9), (0.95, 0.99))
        assert layout.freq_bands[0] == (100.0, 200.0)


# ---------------------------------------------------------------------------
# Layering
# ---------------------------------------------------------------------------


class TestLayering:
    def test_file_then_overrides(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('threshold = 0.7\nseed = 3\nfeature_mode = "energy"\n')
        config = load_run_config(path, {"seed": 11, "threshold": None})
        assert config.threshold == 0.7
        assert config.seed == 11
        assert config.mode is FeatureMode.ENERGY
        assert config.probe_f0 == 20000.0

    def test_bands_from_file_become_tuples(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text(
            "freq_bands = [[100, 200], [50, 100], [-50, 50], [-100, -50], [-200, -100]]\n"
        )
        config = load_run_config(path)
        assert config.freq_bands[2] == (-50.0, 50.0)

    def test_no_file(self):
        assert load_run_config() == RunConfig()

    def test_environment_names_the_file(self, monkeypatch, tmp_path):
        monkeypatch.setenv(CONFIG_PATH_ENV_VAR, str(tmp_path / "run.toml"))
        assert get_environ_config_path() == tmp_path / "run.toml"
        monkeypatch.setenv(CONFIG_PATH_ENV_VAR, "  ")
        assert get_environ_config_path() is None


# ---------------------------------------------------------------------------
# Rejection
# ---------------------------------------------------------------------------


class TestRejection:
    def test_unknown_file_key(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("thresold = 0.7\n")
        with pytest.raises(ConfigError, match="thresold"):
            read_config_file(path)

    def test_unknown_override(self):
        with pytest.raises(ConfigError, match="Unknown configuration keys"):
            RunConfig().with_overrides({"colour": 1})

    def test_not_toml(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("threshold = = 1\n")
        with pytest.raises(ConfigError, match="not valid TOML"):
            read_config_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="Cannot read"):
            read_config_file(tmp_path / "missing.toml")

    @pytest.mark.parametrize(
        "overrides, match",
        [
            ({"sample_rate": 0}, "sample_rate"),
            ({"doppler_factor_k": 0.0}, "doppler_factor_k"),
            ({"threshold": 1.5}, "threshold"),
            ({"wavelet": "nope"}, "wavelet"),
            ({"wavelet_mode": "nope"}, "extension mode"),
            ({"feature_mode": "spectral"}, "feature_mode"),
            ({"min_trials": 1}, "min_trials"),
            ({"freq_bands": ((1.0, 2.0),)}, "band edges"),
            ({"energy_levels": (1.0,)}, "pair"),
        ],
    )
    def test_invalid_values(self, overrides, match):
        with pytest.raises(ConfigError, match=match):
            RunConfig().with_overrides(overrides)


# ---------------------------------------------------------------------------
# Logging
# ---------------------------------------------------------------------------


class TestLoggingConfig:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv(LOG_LEVEL_ENV_VAR, raising=False)
        monkeypatch.delenv(LOG_FORMAT_ENV_VAR, raising=False)
        assert get_logging_env_vars() == ("INFO", "text")

    def test_package_logger_writes_to_stderr(self, monkeypatch):
        monkeypatch.setenv(LOG_LEVEL_ENV_VAR, "debug")
        monkeypatch.setenv(LOG_FORMAT_ENV_VAR, "brief")
        config = _build_logging_config()
        assert config["loggers"]["gesturelive"]["level"] == "DEBUG"
        assert config["handlers"]["console"]["stream"] == "ext://sys.stderr"
        assert "asctime" not in config["formatters"]["gesturelive"]["format"]

    def test_unknown_level_falls_back(self, monkeypatch):
        monkeypatch.setenv(LOG_LEVEL_ENV_VAR, "chatty")
        config = _build_logging_config()
        assert config["loggers"]["gesturelive"]["level"] == logging.getLevelName(
            logging.INFO
        )
