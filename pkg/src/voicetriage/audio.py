"""Decoding of 16 kHz 16-bit PCM WAV speech recordings into sample buffers."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

REQUIRED_SAMPLE_RATE = 16000
MAX_CLIP_SECONDS = 10.0
INT16_FULL_SCALE = 32768.0

_PCM_FORMAT_TAG = 1


class AudioError(ValueError):
    """Base class for audio decoding failures."""


class MalformedContainer(AudioError):
    """Input is not a parseable RIFF/WAVE container."""


class UnsupportedRate(AudioError):
    """Sample rate differs from the required 16 kHz (no resampling)."""


class UnsupportedEncoding(AudioError):
    """Encoding is not 16-bit integer PCM with 1 or 2 channels."""


class EmptyAudio(AudioError):
    """Container is valid but holds zero samples."""


@dataclass(frozen=True)
class AudioClip:
    """Mono speech segment, normalized to [-1, 1] at 16 kHz, at most 10 s."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional (mono)")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if samples.size and np.max(np.abs(samples)) > 1.0 + 1e-9:
            raise ValueError("samples must lie within [-1, 1]")
        if self.duration > MAX_CLIP_SECONDS + 1e-9:
            raise ValueError(f"clip exceeds {MAX_CLIP_SECONDS} s")

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def _read_chunks(data: bytes) -> dict[bytes, bytes]:
    """Walk the RIFF chunk list, returning the first chunk of each id."""
    chunks: dict[bytes, bytes] = {}
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise MalformedContainer(f"truncated {cid!r} chunk")
        chunks.setdefault(cid, body)
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    return chunks


def decode_wav(data: bytes) -> AudioClip:
    """Decode WAV bytes into an AudioClip.

    Accepts RIFF/WAVE with 16-bit integer PCM at 16 kHz, mono or stereo.
    Stereo is down-mixed by channel averaging. Content past 10 s is
    discarded. Raises MalformedContainer, UnsupportedRate,
    UnsupportedEncoding, or EmptyAudio.
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedContainer("not a RIFF/WAVE container")
    chunks = _read_chunks(data)
    if b"fmt " not in chunks or b"data" not in chunks:
        raise MalformedContainer("missing fmt or data chunk")
    fmt = chunks[b"fmt "]
    if len(fmt) < 16:
        raise MalformedContainer("fmt chunk too short")
    format_tag, channels, rate, _byte_rate, block_align, bits = struct.unpack_from(
        "<HHIIHH", fmt, 0
    )
    if format_tag != _PCM_FORMAT_TAG:
        raise UnsupportedEncoding(f"format tag {format_tag} is not integer PCM")
    if bits != 16:
        raise UnsupportedEncoding(f"{bits}-bit samples are not supported")
    if channels not in (1, 2):
        raise UnsupportedEncoding(f"{channels} channels are not supported")
    if rate != REQUIRED_SAMPLE_RATE:
        raise UnsupportedRate(f"sample rate {rate} Hz, expected {REQUIRED_SAMPLE_RATE}")

    body = chunks[b"data"]
    frame_size = block_align if block_align else 2 * channels
    n_frames = len(body) // frame_size
    if n_frames == 0:
        raise EmptyAudio("data chunk holds no samples")

    raw = np.frombuffer(body[: n_frames * frame_size], dtype="<i2")
    raw = raw.reshape(-1, channels)
    # Average channels in float, then map to [-1, 1) by the symmetric divisor.
    samples = raw.mean(axis=1) / INT16_FULL_SCALE
    max_samples = int(MAX_CLIP_SECONDS * rate)
    samples = samples[:max_samples]
    return AudioClip(samples=samples, sample_rate=rate)


def encode_wav(clip: AudioClip) -> bytes:
    """Encode an AudioClip as mono 16-bit PCM WAV bytes."""
    ints = np.round(clip.samples * INT16_FULL_SCALE)
    ints = np.clip(ints, -32768, 32767).astype("<i2")
    body = ints.tobytes()
    fmt = struct.pack(
        "<HHIIHH", _PCM_FORMAT_TAG, 1, clip.sample_rate, clip.sample_rate * 2, 2, 16
    )
    out = b"WAVE"
    out += b"fmt " + struct.pack("<I", len(fmt)) + fmt
    out += b"data" + struct.pack("<I", len(body)) + body
    return b"RIFF" + struct.pack("<I", len(out)) + out
