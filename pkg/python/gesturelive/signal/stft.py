"""
Contain the short-time Fourier transform used for Doppler extraction.

Frames are Hann-windowed and zero-padded so that the bin spacing reaches the requested
width. Zero-padding interpolates the spectrum on a finer grid; the true resolution is
still set by the window length (4 Hz for a 250 ms window).
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass
from typing import Tuple
import math

# 3rd party imports
import numpy as np
import numpy.typing as npt
from scipy import fft as spfft
from scipy import signal as sps

# Our imports
from gesturelive.signal import InsufficientSignalError, SignalError
from gesturelive.signal.audio import AudioBuffer

DEFAULT_WINDOW_S = 0.25
DEFAULT_HOP_S = 0.01
DEFAULT_BIN_WIDTH_HZ = 1.0

# Frames transformed per FFT call; bounds the memory of long zero-padded transforms.
_FRAMES_PER_BATCH = 16


@dataclass(frozen=True)
class Spectrogram:
    """
    A time-frequency grid of complex STFT values indexed [frame][bin].

    Bin b is centered on freq_origin_hz + b * bin_width_hz, and frame k covers the time
    span [k * frame_hop_s, k * frame_hop_s + window_len_s).
    """

    frames: npt.NDArray[np.complex128]
    frame_hop_s: float
    window_len_s: float
    bin_width_hz: float
    freq_origin_hz: float
    sample_rate: float
    fft_size: int

    def __post_init__(self):
        """Freeze the frame matrix."""
        frames = np.array(self.frames, dtype=np.complex128)
        frames.flags.writeable = False
        object.__setattr__(self, "frames", frames)

    @property
    def frame_count(self) -> int:
        """Return the number of frames."""
        return int(self.frames.shape[0])

    @property
    def bin_count(self) -> int:
        """Return the number of frequency bins kept."""
        return int(self.frames.shape[1])

    @property
    def magnitudes(self) -> npt.NDArray[np.float64]:
        """Return the non-negative magnitudes of the frames."""
        return np.abs(self.frames)

    def bin_frequencies_hz(self) -> npt.NDArray[np.float64]:
        """Return the center frequency of every kept bin."""
        return self.freq_origin_hz + self.bin_width_hz * np.arange(self.bin_count)

    def frame_centers_s(self) -> npt.NDArray[np.float64]:
        """Return the time of the center of every frame's window."""
        return self.frame_hop_s * np.arange(self.frame_count) + self.window_len_s / 2


def fft_size_for(sample_rate: float, window_samples: int, target_bin_width: float) -> int:
    """
    Return the smallest FFT size covering the window with bins no wider than the target.

    :param sample_rate: The sample rate in Hz.
    :param window_samples: The number of samples in one window.
    :param target_bin_width: The widest acceptable bin spacing in Hz.
    """
    if target_bin_width <= 0:
        raise SignalError(f"Target bin width must be positive, got {target_bin_width}.")
    return max(window_samples, int(math.ceil(sample_rate / target_bin_width - 1e-9)))


def stft(
    buffer: AudioBuffer,
    window_len: float = DEFAULT_WINDOW_S,
    hop: float = DEFAULT_HOP_S,
    target_bin_width: float = DEFAULT_BIN_WIDTH_HZ,
    freq_range: Tuple[float, float] | None = None,
) -> Spectrogram:
    """
    Compute the Hann-windowed, zero-padded STFT of a single-channel buffer.

    The number of frames is floor((length - window) / hop) + 1, with window and hop
    rounded to whole samples.

    :param buffer: The single-channel input.
    :param window_len: The window length in seconds.
    :param hop: The hop between frames in seconds.
    :param target_bin_width: The widest acceptable bin spacing in Hz.
    :param freq_range: If given, only bins whose center lies within this (low, high)
      range in Hz are kept, and freq_origin_hz is the center of the first kept bin.

    :returns The spectrogram.

    :raises InsufficientSignalError if the buffer is shorter than one window.
    """
    buffer.require_mono()
    if hop <= 0:
        raise SignalError(f"Hop must be positive, got {hop}.")
    sample_rate = float(buffer.sample_rate)
    window_samples = int(round(window_len * sample_rate))
    hop_samples = max(1, int(round(hop * sample_rate)))
    if window_samples < 1:
        raise SignalError(f"Window of {window_len} s holds no samples.")
    data = buffer.data()
    if data.size < window_samples:
        raise InsufficientSignalError(
            f"Signal of {data.size} samples is shorter than one {window_samples}-sample "
            "window."
        )

    fft_size = fft_size_for(sample_rate, window_samples, target_bin_width)
    bin_width = sample_rate / fft_size
    bin_total = fft_size // 2 + 1
    if freq_range is None:
        first_bin, last_bin = 0, bin_total
    else:
        low, high = freq_range
        first_bin = max(0, int(math.ceil(low / bin_width - 1e-9)))
        last_bin = min(bin_total, int(math.floor(high / bin_width + 1e-9)) + 1)
        if last_bin <= first_bin:
            raise SignalError(f"Frequency range {freq_range} holds no bins.")

    window = sps.get_window("hann", window_samples, fftbins=True)
    frame_count = (data.size - window_samples) // hop_samples + 1
    frames = np.empty((frame_count, last_bin - first_bin), dtype=np.complex128)
    for start in range(0, frame_count, _FRAMES_PER_BATCH):
        stop = min(frame_count, start + _FRAMES_PER_BATCH)
        offsets = hop_samples * np.arange(start, stop)
        segments = data[offsets[:, np.newaxis] + np.arange(window_samples)] * window
        spectrum = spfft.rfft(segments, n=fft_size, axis=1)
        frames[start:stop] = spectrum[:, first_bin:last_bin]

    return Spectrogram(
        frames=frames,
        frame_hop_s=hop_samples / sample_rate,
        window_len_s=window_samples / sample_rate,
        bin_width_hz=bin_width,
        freq_origin_hz=first_bin * bin_width,
        sample_rate=sample_rate,
        fft_size=fft_size,
    )
