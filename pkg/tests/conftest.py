"""Shared fixtures of the test suite."""

# Python imports
from pathlib import Path
from typing import Iterator
import logging

# 3rd party imports
import numpy as np
import pytest

# Our imports
from gesturelive.config.run_config import RunConfig
from gesturelive.signal.audio import AudioBuffer

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(autouse=True)
def _propagate_package_logs() -> Iterator[None]:
    # The logging configuration stops package records at the "gesturelive" logger;
    # caplog listens on the root logger.
    package_logger = logging.getLogger("gesturelive")
    previous = package_logger.propagate
    package_logger.propagate = True
    yield
    package_logger.propagate = previous


@pytest.fixture
def config() -> RunConfig:
    """Return the default run configuration."""
    return RunConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    """Return a seeded random generator."""
    return np.random.default_rng(1234)


def tone(
    frequency: float, duration: float, sample_rate: float = 48000.0, amplitude=1.0
) -> AudioBuffer:
    """Return a single-channel sine tone."""
    t = np.arange(int(round(duration * sample_rate))) / sample_rate
    return AudioBuffer.mono(amplitude * np.sin(2 * np.pi * frequency * t), sample_rate)
