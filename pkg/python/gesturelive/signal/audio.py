"""
Contain the `AudioBuffer` type and WAV file ingestion/emission.

Every signal in the system, from the emitted probe to a seven-channel array recording,
travels as an `AudioBuffer`. Buffers are immutable: their sample matrix is marked
read-only on construction so they can be shared freely between threads.
"""

from __future__ import annotations

# Python imports
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal
import logging

# 3rd party imports
import numpy as np
import numpy.typing as npt
from scipy.io import wavfile

# Our imports
from gesturelive.signal import ChannelError, SignalError

logger = logging.getLogger(__name__)

STANDARD_SAMPLE_RATES = (48000, 96000, 192000)

WavSubtype = Literal["PCM_16", "FLOAT"]

_PCM16_SCALE = 32768.0


@dataclass(frozen=True)
class AudioBuffer:
    """
    Multichannel PCM samples together with their sample rate.

    Samples are stored as a float64 matrix of shape (channel_count, length) with a
    nominal amplitude range of [-1, 1].
    """

    samples: npt.NDArray[np.float64]
    sample_rate: float

    def __post_init__(self):
        """Validate the buffer and freeze its sample matrix."""
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples[np.newaxis, :]
        if samples.ndim != 2 or samples.shape[0] < 1:
            raise SignalError(
                f"Samples must be a (channels, length) matrix, got shape {samples.shape}."
            )
        if not self.sample_rate > 0:
            raise SignalError(f"Sample rate must be positive, got {self.sample_rate}.")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @classmethod
    def mono(cls, samples: npt.ArrayLike, sample_rate: float) -> AudioBuffer:
        """Build a single-channel buffer from a one-dimensional sequence."""
        return cls(np.asarray(samples, dtype=np.float64).reshape(1, -1), sample_rate)

    @classmethod
    def from_channels(
        cls, channels: Iterable[npt.ArrayLike], sample_rate: float
    ) -> AudioBuffer:
        """
        Build a multichannel buffer from per-channel sequences.

        :param channels: One sequence per channel; all must have the same length.
        :param sample_rate: The sample rate in Hz.

        :raises ChannelError if the channels have different lengths.
        """
        arrays = [np.asarray(c, dtype=np.float64).ravel() for c in channels]
        if not arrays:
            raise ChannelError("At least one channel is required.")
        lengths = {a.size for a in arrays}
        if len(lengths) != 1:
            raise ChannelError(
                f"All channels must have equal length, got lengths {sorted(lengths)}."
            )
        return cls(np.vstack(arrays), sample_rate)

    @property
    def channel_count(self) -> int:
        """Return the number of channels."""
        return int(self.samples.shape[0])

    @property
    def length(self) -> int:
        """Return the number of samples per channel."""
        return int(self.samples.shape[1])

    @property
    def duration_seconds(self) -> float:
        """Return the duration, i.e. length / sample_rate."""
        return self.length / self.sample_rate

    def channel(self, index: int) -> npt.NDArray[np.float64]:
        """Return the samples of one channel as a read-only vector."""
        if not 0 <= index < self.channel_count:
            raise ChannelError(
                f"Channel {index} requested from a {self.channel_count}-channel buffer."
            )
        return self.samples[index]

    def data(self) -> npt.NDArray[np.float64]:
        """
        Return the samples of a single-channel buffer.

        :raises ChannelError if the buffer has more than one channel.
        """
        self.require_mono()
        return self.samples[0]

    def first_channel(self) -> AudioBuffer:
        """Return channel 0 as a single-channel buffer (the center microphone)."""
        return AudioBuffer(self.samples[:1], self.sample_rate)

    def require_mono(self):
        """Raise a `ChannelError` unless this buffer has exactly one channel."""
        if self.channel_count != 1:
            raise ChannelError(
                f"A single-channel buffer is required, got {self.channel_count} "
                "channels."
            )

    def with_samples(self, samples: npt.ArrayLike) -> AudioBuffer:
        """Return a new buffer with the same sample rate and the given samples."""
        return AudioBuffer(np.asarray(samples, dtype=np.float64), self.sample_rate)


def read_wav(path: Path | str) -> AudioBuffer:
    """
    Read a WAV file into an `AudioBuffer`.

    16-bit PCM is scaled by 1/32768 and 32-bit float is taken as is. Sample rates other
    than 48, 96 and 192 kHz are accepted with a warning.

    :param path: The path of the WAV file.

    :returns The buffer, channels first.

    :raises SignalError if the sample format is not supported.
    """
    sample_rate, raw = wavfile.read(str(path))
    if raw.dtype == np.int16:
        data = raw.astype(np.float64) / _PCM16_SCALE
    elif raw.dtype == np.float32 or raw.dtype == np.float64:
        data = raw.astype(np.float64)
    else:
        raise SignalError(
            f"Unsupported WAV sample format {raw.dtype} in {path}; expected 16-bit PCM "
            "or 32-bit float."
        )
    if sample_rate not in STANDARD_SAMPLE_RATES:
        logger.warning(
            f"{path} uses a non-standard sample rate of {sample_rate} Hz; expected one "
            f"of {STANDARD_SAMPLE_RATES}."
        )
    data = data.reshape(-1, 1) if data.ndim == 1 else data
    return AudioBuffer(data.T, float(sample_rate))


def write_wav(buffer: AudioBuffer, path: Path | str, subtype: WavSubtype = "FLOAT"):
    """
    Write an `AudioBuffer` to a little-endian WAV file.

    :param buffer: The buffer to write.
    :param path: The destination path.
    :param subtype: "FLOAT" for 32-bit float samples or "PCM_16" for 16-bit PCM.
    """
    frames = buffer.samples.T
    if subtype == "PCM_16":
        scaled = np.clip(np.round(frames * _PCM16_SCALE), -32768, 32767)
        payload = scaled.astype("<i2")
    else:
        payload = frames.astype("<f4")
    if buffer.channel_count == 1:
        payload = payload[:, 0]
    if float(buffer.sample_rate) != int(buffer.sample_rate):
        raise SignalError(
            f"WAV files need an integer sample rate, got {buffer.sample_rate}."
        )
    wavfile.write(str(path), int(buffer.sample_rate), payload)
