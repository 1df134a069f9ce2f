"""Tests for array geometry, arrival delays and the delay-and-sum beamformer."""

# Python imports
import json

# 3rd party imports
import numpy as np
import pytest

# Our imports
from gesturelive.beamform import GeometryError
from gesturelive.beamform.das import delay_and_sum, steer_search
from gesturelive.beamform.geometry import (
    SPEED_OF_SOUND_M_S,
    ArrayGeometry,
    SteeringDirection,
    circular_array,
    load_geometry,
    tdoa,
)
from gesturelive.signal.audio import AudioBuffer
from gesturelive.sim.array import render_plane_wave

RADIUS = 0.043


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


class TestGeometry:
    def test_circular_array_layout(self):
        geometry = circular_array()
        assert geometry.mic_count == 7
        np.testing.assert_allclose(geometry.mic_positions[0], [0.0, 0.0, 0.0])
        np.testing.assert_allclose(geometry.mic_positions[1], [RADIUS, 0.0, 0.0])
        np.testing.assert_allclose(
            geometry.mic_positions[4], [-RADIUS, 0.0, 0.0], atol=1e-15
        )

    def test_ring_without_center(self):
        assert circular_array(count=4, center=False).mic_count == 4

    def test_duplicate_positions(self):
        with pytest.raises(GeometryError, match="distinct"):
            ArrayGeometry(np.zeros((2, 3)))

    def test_single_microphone(self):
        with pytest.raises(GeometryError, match="at least 2"):
            ArrayGeometry(np.zeros((1, 3)))

    def test_azimuth_wraps(self):
        assert SteeringDirection(-90.0).azimuth == pytest.approx(270.0)
        assert SteeringDirection(720.0).azimuth == pytest.approx(0.0)

    def test_elevation_out_of_range(self):
        with pytest.raises(GeometryError, match="Elevation"):
            SteeringDirection(0.0, 95.0)

    def test_load_geometry(self, tmp_path):
        path = tmp_path / "array.json"
        path.write_text(
            json.dumps({"mic_positions": [[0, 0, 0], [0.1, 0, 0]], "speed_of_sound": 340})
        )
        geometry = load_geometry(path)
        assert geometry.mic_count == 2
        assert geometry.speed_of_sound == 340.0

    def test_load_malformed_geometry(self, tmp_path):
        path = tmp_path / "array.json"
        path.write_text(json.dumps({"positions": []}))
        with pytest.raises(GeometryError, match="Cannot load"):
            load_geometry(path)


class TestTdoa:
    def test_closer_microphone_hears_first(self):
        delays = tdoa(circular_array(), SteeringDirection(0.0))
        assert delays[0] == 0.0
        assert delays[1] == pytest.approx(-RADIUS / SPEED_OF_SOUND_M_S)
        assert delays[4] == pytest.approx(RADIUS / SPEED_OF_SOUND_M_S)

    def test_broadside_source(self):
        delays = tdoa(circular_array(), SteeringDirection(0.0, 90.0))
        np.testing.assert_allclose(delays, 0.0, atol=1e-18)


# ---------------------------------------------------------------------------
# Delay-and-sum
# ---------------------------------------------------------------------------


def _power(values):
    return float(np.mean(values**2))


class TestDelayAndSum:
    def test_steered_beam_recovers_source(self, rng):
        geometry = circular_array()
        source = AudioBuffer.mono(rng.normal(size=9600), 48000)
        direction = SteeringDirection(30.0)
        beam = delay_and_sum(render_plane_wave(source, geometry, direction), geometry, direction)
        np.testing.assert_allclose(
            beam.data()[500:-500], source.data()[500:-500], atol=0.05
        )

    def test_snr_gain_of_seven_microphones(self, rng):
        geometry = circular_array()
        direction = SteeringDirection(45.0)
        source = AudioBuffer.mono(np.sin(2 * np.pi * 1000.0 * np.arange(48000) / 48000), 48000)
        clean = render_plane_wave(source, geometry, direction)
        noise = AudioBuffer(rng.normal(0.0, 1.0, size=(7, 48000)), 48000)

        clean_beam = delay_and_sum(clean, geometry, direction).data()[1000:-1000]
        noise_beam = delay_and_sum(noise, geometry, direction).data()[1000:-1000]
        input_snr = _power(source.data()) / _power(noise.channel(0))
        output_snr = _power(clean_beam) / _power(noise_beam)
        gain_db = 10 * np.log10(output_snr / input_snr)
        assert gain_db == pytest.approx(10 * np.log10(7), abs=1.0)

    def test_incoherent_noise_power_falls_by_the_mic_count(self, rng):
        noise = AudioBuffer(rng.normal(0.0, 1.0, size=(7, 48000)), 48000)
        beam = delay_and_sum(noise, circular_array(), SteeringDirection(45.0))
        assert _power(beam.data()[1000:-1000]) == pytest.approx(1 / 7, rel=0.05)

    def test_channel_mismatch(self):
        channels = AudioBuffer(np.zeros((3, 100)), 48000)
        with pytest.raises(GeometryError, match="3 channels"):
            delay_and_sum(channels, circular_array(), SteeringDirection(0.0))


class TestSteerSearch:
    def test_finds_source_azimuth(self, rng):
        geometry = circular_array()
        source = AudioBuffer.mono(rng.normal(size=4800), 48000)
        channels = render_plane_wave(source, geometry, SteeringDirection(60.0))
        best, power = steer_search(channels, geometry)
        assert best.azimuth == pytest.approx(60.0)
        assert power > 0

    def test_step_must_be_positive(self):
        channels = AudioBuffer(np.zeros((7, 100)), 48000)
        with pytest.raises(GeometryError, match="step"):
            steer_search(channels, circular_array(), step_deg=0.0)
