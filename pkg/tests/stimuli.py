"""Synthetic test signals with known ground truth.

Generators are kept independent of the extraction code: pulse placement,
injected periods, and amplitudes are returned so tests can compute expected
values directly from the construction.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from voicetriage.audio import AudioClip

SR = 16000


def sine_clip(freq: float, duration: float = 1.0, amplitude: float = 0.5) -> AudioClip:
    t = np.arange(int(duration * SR)) / SR
    return AudioClip(amplitude * np.sin(2.0 * np.pi * freq * t), SR)


def silence_clip(duration: float = 1.0) -> AudioClip:
    return AudioClip(np.zeros(int(duration * SR)), SR)


def noise_clip(seed: int, duration: float = 1.0, amplitude: float = 0.5) -> AudioClip:
    rng = np.random.default_rng(seed)
    return AudioClip(rng.uniform(-amplitude, amplitude, int(duration * SR)), SR)


def prepend_silence(clip: AudioClip, duration: float) -> AudioClip:
    pad = np.zeros(int(duration * clip.sample_rate))
    return AudioClip(np.concatenate([pad, clip.samples]), clip.sample_rate)


def with_gain(clip: AudioClip, gain: float) -> AudioClip:
    return AudioClip(clip.samples * gain, clip.sample_rate)


def pulse_train_clip(
    periods: np.ndarray,
    amplitudes: np.ndarray | None = None,
    start: float = 0.05,
    pulse_width: float = 0.003,
    duration: float | None = None,
) -> tuple[AudioClip, np.ndarray]:
    """Hann-shaped pulses at sub-sample instants; returns (clip, pulse_times).

    Pulse k sits at start + sum(periods[:k]); its smooth peak lets markers
    recover timing well below one sample of error.
    """
    periods = np.asarray(periods, dtype=np.float64)
    times = start + np.concatenate([[0.0], np.cumsum(periods)])
    n_pulses = times.size
    if amplitudes is None:
        amplitudes = np.full(n_pulses, 0.6)
    amplitudes = np.asarray(amplitudes, dtype=np.float64)
    total = duration if duration is not None else times[-1] + start
    x = np.zeros(int(round(total * SR)))
    half = pulse_width / 2.0
    for t_k, a_k in zip(times, amplitudes):
        lo = max(0, int(np.floor((t_k - half) * SR)))
        hi = min(x.size, int(np.ceil((t_k + half) * SR)) + 1)
        grid = np.arange(lo, hi) / SR - t_k
        inside = np.abs(grid) < half
        x[lo:hi][inside] += a_k * 0.5 * (1.0 + np.cos(np.pi * grid[inside] / half))
    peak = np.max(np.abs(x))
    if peak > 1.0:
        x = x / (peak * 1.01)
    return AudioClip(x, SR), times


def regular_pulse_train(
    f0: float, duration: float = 1.0, amplitude: float = 0.6
) -> tuple[AudioClip, np.ndarray]:
    n = int((duration - 0.1) * f0)
    periods = np.full(n, 1.0 / f0)
    amps = np.full(n + 1, amplitude)
    return pulse_train_clip(periods, amps, duration=duration)


def resonant_vowel_clip(
    f0: float,
    resonance_hz: float,
    bandwidth_hz: float = 80.0,
    duration: float = 1.0,
    amplitude: float = 0.3,
) -> AudioClip:
    """Glottal-like pulse train through a single two-pole resonator.

    The impulse train is shaped by a leaky integrator so the source falls
    off with frequency the way voiced excitation does.
    """
    x = np.zeros(int(duration * SR))
    step = SR / f0
    positions = np.arange(0.0, x.size - 1, step).astype(int)
    x[positions] = 1.0
    x = lfilter([1.0], [1.0, -0.95], x)  # source spectral slope
    r = np.exp(-np.pi * bandwidth_hz / SR)
    theta = 2.0 * np.pi * resonance_hz / SR
    a = np.array([1.0, -2.0 * r * np.cos(theta), r**2])
    y = lfilter([1.0], a, x)
    return AudioClip(amplitude * y / np.max(np.abs(y)), SR)


def two_level_vowel_clip(
    f0: float,
    first_hz: float,
    second_hz: float,
    bandwidth_hz: float = 80.0,
    segment_s: float = 0.5,
) -> AudioClip:
    """Back-to-back single-resonator segments at two resonance frequencies."""
    first = resonant_vowel_clip(f0, first_hz, bandwidth_hz, segment_s)
    second = resonant_vowel_clip(f0, second_hz, bandwidth_hz, segment_s)
    return AudioClip(np.concatenate([first.samples, second.samples]), SR)


def burst_clip(
    n_bursts: int = 5,
    burst_s: float = 0.15,
    gap_s: float = 0.15,
    carrier_hz: float = 220.0,
    amplitude: float = 0.6,
) -> AudioClip:
    """Amplitude-modulated carrier bursts separated by silence."""
    burst_n = int(burst_s * SR)
    gap_n = int(gap_s * SR)
    t = np.arange(burst_n) / SR
    envelope = np.sin(np.pi * np.arange(burst_n) / burst_n) ** 0.5
    burst = envelope * np.sin(2.0 * np.pi * carrier_hz * t)
    pieces = []
    for _ in range(n_bursts):
        pieces.append(burst)
        pieces.append(np.zeros(gap_n))
    return AudioClip(amplitude * np.concatenate(pieces), SR)


def arched_vowel_clip(
    freq: float = 220.0, duration: float = 1.0, amplitude: float = 0.5
) -> AudioClip:
    """Steady tone with a gentle intensity arc, like a sustained vowel."""
    n = int(duration * SR)
    t = np.arange(n) / SR
    envelope = 0.6 + 0.4 * np.sin(np.pi * np.arange(n) / n)
    return AudioClip(amplitude * envelope * np.sin(2.0 * np.pi * freq * t), SR)


def utterance_clip(duration: float = 4.0, f0: float = 110.0) -> AudioClip:
    """Speech-like stimulus where every biomarker has a realistic magnitude.

    A vibrato pulse train drives two successive resonators, under a slow
    intensity arc: nonzero jitter and shimmer, f0 spread from the vibrato,
    and first-formant variance from the resonance change.
    """
    periods = []
    t = 0.0
    while t < duration - 0.1:
        p = (1.0 / f0) * (1.0 + 0.02 * np.sin(2.0 * np.pi * 3.0 * t))
        periods.append(p)
        t += p
    periods = np.asarray(periods)
    x = np.zeros(int(duration * SR))
    positions = (0.05 + np.concatenate([[0.0], np.cumsum(periods[:-1])])) * SR
    x[positions.astype(int)] = 1.0
    x = lfilter([1.0], [1.0, -0.95], x)

    half = x.size // 2
    out = np.empty_like(x)
    for seg, resonance in ((slice(0, half), 450.0), (slice(half, x.size), 700.0)):
        r = np.exp(-np.pi * 80.0 / SR)
        theta = 2.0 * np.pi * resonance / SR
        out[seg] = lfilter([1.0], [1.0, -2.0 * r * np.cos(theta), r**2], x[seg])
    envelope = 0.6 + 0.4 * np.sin(np.pi * np.arange(out.size) / out.size)
    out = out * envelope
    return AudioClip(0.5 * out / np.max(np.abs(out)), SR)
