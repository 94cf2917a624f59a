"""Syllable nucleus detection from the intensity contour."""

from __future__ import annotations

import numpy as np
from scipy.signal import find_peaks

from ..audio import AudioClip
from .pitch import PitchTrack, track_pitch

NUCLEUS_DIP_DB = 2.0
FLOOR_MARGIN_DB = 25.0
# Fallback floor when a clip has no frames 25 dB under its peak (continuous
# phonation): assume the noise floor sits this far below the loudest frame.
DEFAULT_FLOOR_DROP_DB = 50.0
_POWER_EPS = 1e-30


def intensity_contour(clip: AudioClip, track: PitchTrack) -> np.ndarray:
    """Frame intensity in dB, on the same framing as the pitch track."""
    sr = clip.sample_rate
    step = int(round(track.frame_step * sr))
    window = int(round(2 * (track.times[0] * sr))) if track.times.size else 0
    if track.times.size == 0:
        return np.empty(0)
    frames = np.lib.stride_tricks.sliding_window_view(clip.samples, window)[::step]
    frames = frames[: track.times.size]
    power = np.mean(frames**2, axis=1)
    return 10.0 * np.log10(power + _POWER_EPS)


def syllable_nuclei(
    clip: AudioClip, track: PitchTrack | None = None
) -> tuple[int, float, float]:
    """Count syllable nuclei and measure phonation time.

    A nucleus is an intensity peak that rises at least 2 dB above its
    surrounding dips, clears the silence floor by 25 dB, and falls on a
    voiced pitch frame. The silence floor is the median intensity of frames
    more than 25 dB below the loudest frame (or a fixed drop below the peak
    when no such frames exist). Returns (count, phonation_time, total_time);
    phonation time is the summed duration of voiced frames above the floor.
    """
    if track is None:
        track = track_pitch(clip)
    total_time = clip.duration
    if track.times.size == 0:
        return 0, 0.0, total_time

    db = intensity_contour(clip, track)
    silent = db < db.max() - FLOOR_MARGIN_DB
    if np.any(silent):
        floor_db = float(np.median(db[silent]))
    else:
        floor_db = float(db.max() - DEFAULT_FLOOR_DROP_DB)
    threshold = floor_db + FLOOR_MARGIN_DB

    above = db >= threshold
    voiced = track.voiced
    peaks, _ = find_peaks(db, prominence=NUCLEUS_DIP_DB)
    count = int(np.sum(above[peaks] & voiced[peaks]))
    phonation_time = float(np.count_nonzero(above & voiced)) * track.frame_step
    return count, phonation_time, total_time
