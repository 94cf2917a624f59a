"""Short-time autocorrelation pitch tracking with voiced/unvoiced decisions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..audio import AudioClip

DEFAULT_FLOOR_HZ = 75.0
DEFAULT_CEILING_HZ = 300.0
FRAME_STEP_S = 0.01
VOICING_THRESHOLD = 0.45
# A frame is silent when its RMS falls below this fraction of the clip's
# peak amplitude; keeping it relative makes voicing gain-invariant.
SILENCE_RMS_RATIO = 0.03
# Autocorrelation peaks within this margin of the frame maximum are treated
# as harmonically equivalent and the shortest lag wins (guards against
# picking the double-period peak of a near-perfectly periodic frame).
PEAK_TIE_MARGIN = 0.02


class NoVoicedFrames(ValueError):
    """Raised when an operation needs voiced frames and the track has none."""


@dataclass(frozen=True)
class PitchTrack:
    """Frame-wise fundamental frequency estimates.

    ``f0`` holds one value per frame, 0.0 where the frame is unvoiced.
    Frame times are window centers, spaced by ``frame_step``.
    """

    times: np.ndarray
    f0: np.ndarray
    frame_step: float
    floor: float
    ceiling: float

    @property
    def voiced(self) -> np.ndarray:
        return self.f0 > 0.0

    @property
    def n_voiced(self) -> int:
        return int(np.count_nonzero(self.voiced))

    def voiced_f0(self) -> np.ndarray:
        return self.f0[self.voiced]


def track_pitch(
    clip: AudioClip,
    floor: float = DEFAULT_FLOOR_HZ,
    ceiling: float = DEFAULT_CEILING_HZ,
) -> PitchTrack:
    """Estimate F0 per frame by normalized short-time autocorrelation.

    Window length is 3 periods of ``floor`` (40 ms at the default floor),
    stepped every 10 ms. A frame is voiced when the boundary-corrected
    autocorrelation peak inside the candidate lag range exceeds
    VOICING_THRESHOLD and the frame is not silent. The winning lag is
    refined by parabolic interpolation and clamped to [floor, ceiling].
    """
    if not floor < ceiling:
        raise ValueError("floor must be below ceiling")
    sr = clip.sample_rate
    x = clip.samples
    window = int(round(3.0 * sr / floor))
    step = int(round(FRAME_STEP_S * sr))
    if x.size < window:
        empty = np.empty(0, dtype=np.float64)
        return PitchTrack(empty, empty.copy(), FRAME_STEP_S, floor, ceiling)

    frames = np.lib.stride_tricks.sliding_window_view(x, window)[::step]
    n_frames = frames.shape[0]
    starts = np.arange(n_frames) * step
    times = (starts + window / 2.0) / sr

    lag_min = int(np.ceil(sr / ceiling))
    lag_max = min(int(np.floor(sr / floor)), window - 1)

    centered = frames - frames.mean(axis=1, keepdims=True)
    rms = np.sqrt(np.mean(centered**2, axis=1))
    peak = np.max(np.abs(x))
    silence_rms = SILENCE_RMS_RATIO * peak

    # Linear autocorrelation out to lag_max + 1 via FFT.
    nfft = 1 << int(np.ceil(np.log2(window + lag_max + 2)))
    spectra = np.fft.rfft(centered, nfft, axis=1)
    acf = np.fft.irfft(spectra.real**2 + spectra.imag**2, nfft, axis=1)
    acf = acf[:, : lag_max + 2]
    # Correct the rectangular-window boundary taper so a stationary periodic
    # frame scores near 1.0 at every multiple of its period.
    lags = np.arange(lag_max + 2)
    correction = window / np.maximum(window - lags, 1)

    f0 = np.zeros(n_frames, dtype=np.float64)
    for i in range(n_frames):
        r0 = acf[i, 0]
        if r0 <= 0.0 or rms[i] <= silence_rms:
            continue
        r = acf[i] / r0 * correction
        seg = r[lag_min : lag_max + 1]
        local_max = (seg > r[lag_min - 1 : lag_max]) & (seg >= r[lag_min + 1 : lag_max + 2])
        candidates = np.nonzero(local_max)[0]
        if candidates.size == 0:
            continue
        values = seg[candidates]
        best = values.max()
        if best <= VOICING_THRESHOLD:
            continue
        lag = int(candidates[values >= best - PEAK_TIE_MARGIN][0]) + lag_min
        # Parabolic refinement around the integer peak.
        rm, rc, rp = r[lag - 1], r[lag], r[lag + 1]
        denom = rm - 2.0 * rc + rp
        delta = 0.5 * (rm - rp) / denom if abs(denom) > 1e-30 else 0.0
        delta = float(np.clip(delta, -1.0, 1.0))
        f0[i] = float(np.clip(sr / (lag + delta), floor, ceiling))

    return PitchTrack(times, f0, step / sr, floor, ceiling)


def f0_stats(track: PitchTrack) -> tuple[float, float]:
    """Mean and population standard deviation of F0 over voiced frames."""
    voiced = track.voiced_f0()
    if voiced.size < 2:
        raise NoVoicedFrames(f"need at least 2 voiced frames, have {voiced.size}")
    return float(np.mean(voiced)), float(np.std(voiced))
