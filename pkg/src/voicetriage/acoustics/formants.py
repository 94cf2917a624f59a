"""First-formant estimation by linear prediction over voiced frames."""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_toeplitz

from ..audio import AudioClip
from .pitch import NoVoicedFrames, PitchTrack

PREEMPHASIS = 0.97
LPC_WINDOW_S = 0.025
LPC_ORDER = 10
MAX_FORMANT_BANDWIDTH_HZ = 400.0
F1_RANGE_HZ = (200.0, 1000.0)


class NoFormantFrames(ValueError):
    """No voiced frame yielded an in-range first-formant candidate."""


def _lpc_coefficients(frame: np.ndarray, order: int) -> np.ndarray | None:
    """Autocorrelation-method LPC; returns [1, a1..a_order] or None."""
    n = frame.size
    acf = np.correlate(frame, frame, mode="full")[n - 1 : n + order]
    if acf[0] <= 0.0:
        return None
    try:
        a = solve_toeplitz((acf[:-1], acf[:-1]), -acf[1:])
    except np.linalg.LinAlgError:
        return None
    coeffs = np.concatenate(([1.0], a))
    if not np.all(np.isfinite(coeffs)):
        return None
    return coeffs


def _frame_f1(frame: np.ndarray, sr: int) -> float | None:
    """Lowest in-range formant of one windowed frame, or None."""
    coeffs = _lpc_coefficients(frame, LPC_ORDER)
    if coeffs is None:
        return None
    roots = np.roots(coeffs)
    roots = roots[np.imag(roots) > 0.0]
    if roots.size == 0:
        return None
    freqs = np.angle(roots) * sr / (2.0 * np.pi)
    mags = np.abs(roots)
    bandwidths = -np.log(np.maximum(mags, 1e-12)) * sr / np.pi
    ok = (
        (bandwidths < MAX_FORMANT_BANDWIDTH_HZ)
        & (freqs >= F1_RANGE_HZ[0])
        & (freqs <= F1_RANGE_HZ[1])
    )
    if not np.any(ok):
        return None
    return float(np.min(freqs[ok]))


def first_formant_track(
    clip: AudioClip, track: PitchTrack
) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame F1 estimates at voiced pitch frames.

    Pre-emphasizes the clip, takes a 25 ms Hamming window centered on each
    voiced frame, fits order-10 LPC, and keeps the lowest root inside
    [200, 1000] Hz whose bandwidth is under 400 Hz. Frames without an
    in-range candidate are skipped. Returns (times, f1_values).
    """
    if track.n_voiced == 0:
        raise NoVoicedFrames("pitch track has no voiced frames")
    sr = clip.sample_rate
    x = clip.samples
    emphasized = np.empty_like(x)
    emphasized[0] = x[0]
    emphasized[1:] = x[1:] - PREEMPHASIS * x[:-1]

    half = int(round(LPC_WINDOW_S * sr / 2))
    window = np.hamming(2 * half)

    times: list[float] = []
    values: list[float] = []
    for t in track.times[track.voiced]:
        center = int(round(t * sr))
        lo, hi = center - half, center + half
        if lo < 0 or hi > x.size:
            continue
        f1 = _frame_f1(emphasized[lo:hi] * window, sr)
        if f1 is not None:
            times.append(float(t))
            values.append(f1)
    return np.asarray(times), np.asarray(values)


def f1_variance(clip: AudioClip, track: PitchTrack) -> float:
    """Population variance (Hz^2) of per-frame F1 over retained voiced frames."""
    _, values = first_formant_track(clip, track)
    if values.size == 0:
        raise NoFormantFrames("no voiced frame produced an in-range F1")
    return float(np.var(values))
