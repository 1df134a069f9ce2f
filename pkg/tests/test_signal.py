"""Tests for the signal package: buffers, WAV files, the probe, filters and STFT."""

# Python imports
import logging

# 3rd party imports
import numpy as np
import pytest
from scipy import signal as sps

# Our imports
from conftest import tone
from gesturelive.signal import (
    ChannelError,
    FrequencyAliasingError,
    InsufficientSignalError,
    SampleRateError,
)
from gesturelive.signal.audio import AudioBuffer, read_wav, write_wav
from gesturelive.signal.filters import (
    bandpass_probe,
    lowpass_voice,
    probe_bandpass_sos,
    split_bands,
)
from gesturelive.signal.probe import generate_probe
from gesturelive.signal.stft import fft_size_for, stft


# ---------------------------------------------------------------------------
# AudioBuffer and WAV files
# ---------------------------------------------------------------------------


class TestAudioBuffer:
    def test_mono_shape(self):
        buffer = AudioBuffer.mono([0.0, 0.5, -0.5], 48000)
        assert buffer.channel_count == 1
        assert buffer.length == 3
        assert buffer.duration_seconds == pytest.approx(3 / 48000)

    def test_samples_are_read_only(self):
        buffer = AudioBuffer.mono(np.zeros(4), 48000)
        with pytest.raises(ValueError):
            buffer.samples[0, 0] = 1.0

    def test_unequal_channels_rejected(self):
        with pytest.raises(ChannelError, match="equal length"):
            AudioBuffer.from_channels([np.zeros(4), np.zeros(5)], 48000)

    def test_data_requires_single_channel(self):
        buffer = AudioBuffer.from_channels([np.zeros(4), np.ones(4)], 48000)
        with pytest.raises(ChannelError):
            buffer.data()
        np.testing.assert_array_equal(buffer.first_channel().data(), np.zeros(4))
        np.testing.assert_array_equal(buffer.channel(1), np.ones(4))


class TestWavFiles:
    def test_float_round_trip(self, tmp_path):
        buffer = tone(1000.0, 0.01)
        write_wav(buffer, tmp_path / "tone.wav")
        loaded = read_wav(tmp_path / "tone.wav")
        assert loaded.sample_rate == 48000
        np.testing.assert_allclose(loaded.data(), buffer.data(), atol=1e-7)

    def test_pcm16_scaling(self, tmp_path):
        buffer = AudioBuffer.mono([0.5, -0.5, 0.0], 48000)
        write_wav(buffer, tmp_path / "pcm.wav", subtype="PCM_16")
        loaded = read_wav(tmp_path / "pcm.wav")
        np.testing.assert_array_equal(loaded.data(), [0.5, -0.5, 0.0])

    def test_channels_preserved(self, tmp_path):
        buffer = AudioBuffer.from_channels([np.zeros(8), np.full(8, 0.25)], 96000)
        write_wav(buffer, tmp_path / "two.wav")
        loaded = read_wav(tmp_path / "two.wav")
        assert loaded.channel_count == 2
        np.testing.assert_allclose(loaded.channel(1), 0.25)

    def test_non_standard_rate_warns(self, tmp_path, caplog):
        write_wav(AudioBuffer.mono(np.zeros(10), 44100), tmp_path / "cd.wav")
        with caplog.at_level(logging.WARNING):
            loaded = read_wav(tmp_path / "cd.wav")
        assert loaded.sample_rate == 44100
        assert "non-standard sample rate" in caplog.text


# ---------------------------------------------------------------------------
# Probe
# ---------------------------------------------------------------------------


class TestProbe:
    def test_samples(self):
        probe = generate_probe(48000, 20000.0, duration=0.01, amplitude=0.5)
        k = np.arange(480)
        np.testing.assert_allclose(
            probe.data(), 0.5 * np.sin(2 * np.pi * 20000.0 * k / 48000), atol=1e-12
        )

    def test_zero_duration(self):
        assert generate_probe(48000, duration=0.0).length == 0

    def test_aliasing_rejected(self):
        with pytest.raises(FrequencyAliasingError, match="Nyquist"):
            generate_probe(40000, 20000.0)


# ---------------------------------------------------------------------------
# Filters
# ---------------------------------------------------------------------------


class TestFilters:
    def test_probe_band_edges_are_3db_down(self):
        sos = probe_bandpass_sos(48000.0)
        _, response = sps.sosfreqz(sos, worN=[19800.0, 20200.0], fs=48000.0)
        # Forward-backward filtering squares the single-pass magnitude.
        gain_db = 20 * np.log10(np.abs(response) ** 2)
        np.testing.assert_allclose(gain_db, -3.0103, atol=0.1)

    def test_probe_band_keeps_probe(self):
        probe = tone(20000.0, 0.5)
        filtered = bandpass_probe(probe).data()[4800:-4800]
        ratio = np.sum(filtered**2) / np.sum(probe.data()[4800:-4800] ** 2)
        assert ratio == pytest.approx(1.0, abs=0.02)

    def test_probe_band_rejects_voice(self):
        voice = tone(1000.0, 0.5)
        filtered = bandpass_probe(voice).data()
        assert np.sum(filtered**2) < 1e-6 * np.sum(voice.data() ** 2)

    def test_voice_band_rejects_probe(self):
        filtered = lowpass_voice(tone(20000.0, 0.5)).data()[4800:-4800]
        assert np.max(np.abs(filtered)) < 1e-3

    def test_split_is_idempotent(self):
        t = np.arange(24000) / 48000
        data = (
            np.sin(2 * np.pi * 1000.0 * t)
            + 0.3 * np.sin(2 * np.pi * 20000.0 * t)
            + 0.2 * np.sin(2 * np.pi * 20050.0 * t)
        )
        voice, probe = split_bands(AudioBuffer.mono(data, 48000))
        voice_again, _ = split_bands(voice)
        _, probe_again = split_bands(probe)
        middle = slice(4800, -4800)
        for once, twice in ((voice, voice_again), (probe, probe_again)):
            error = np.max(np.abs(twice.data()[middle] - once.data()[middle]))
            assert error <= 1e-3 * np.max(np.abs(once.data()[middle]))

    @pytest.mark.parametrize("band_filter", [bandpass_probe, lowpass_voice])
    def test_symmetric_pulse_stays_symmetric(self, band_filter):
        pulse = np.zeros(48001)
        pulse[24000] = 1.0
        response = band_filter(AudioBuffer.mono(pulse, 48000)).data()
        scale = np.max(np.abs(response))
        np.testing.assert_allclose(response, response[::-1], atol=1e-6 * scale)
        assert np.argmax(np.abs(response)) == 24000

    def test_split_needs_high_rate(self):
        with pytest.raises(SampleRateError, match="44100"):
            split_bands(AudioBuffer.mono(np.zeros(100), 16000))


# ---------------------------------------------------------------------------
# STFT
# ---------------------------------------------------------------------------


class TestStft:
    def test_fft_size(self):
        assert fft_size_for(48000, 12000, 1.0) == 48000
        assert fft_size_for(48000, 12000, 8.0) == 12000

    def test_frame_count_and_centers(self):
        spectrogram = stft(tone(20000.0, 1.0), 0.25, 0.01, 1.0)
        assert spectrogram.frame_count == (48000 - 12000) // 480 + 1
        assert spectrogram.bin_width_hz == pytest.approx(1.0)
        np.testing.assert_allclose(spectrogram.frame_centers_s()[:2], [0.125, 0.135])

    def test_peak_at_probe(self):
        spectrogram = stft(tone(20000.0, 0.5), freq_range=(19795.0, 20205.0))
        assert spectrogram.freq_origin_hz == pytest.approx(19795.0)
        peaks = np.argmax(spectrogram.magnitudes, axis=1)
        assert set(spectrogram.bin_frequencies_hz()[peaks]) == {20000.0}

    def test_short_signal_rejected(self):
        with pytest.raises(InsufficientSignalError):
            stft(tone(20000.0, 0.1))

    def test_parseval_over_one_frame(self, rng):
        data = rng.normal(size=12000)
        spectrogram = stft(AudioBuffer.mono(data, 48000))
        assert spectrogram.frame_count == 1
        spectrum = np.abs(spectrogram.frames[0]) ** 2
        # One-sided spectrum of an even-length transform.
        total = spectrum[0] + spectrum[-1] + 2 * np.sum(spectrum[1:-1])
        windowed = data * sps.get_window("hann", 12000, fftbins=True)
        assert total / spectrogram.fft_size == pytest.approx(
            np.sum(windowed**2), rel=1e-6
        )
