"""Glottal cycle marking: one waveform peak per pitch period in voiced regions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..audio import AudioClip
from .pitch import NoVoicedFrames, PitchTrack

# Search window for the adjacent cycle, as fractions of the local period.
MIN_PERIOD_RATIO = 0.8
MAX_PERIOD_RATIO = 1.25
# Half-width of the waveform template used in the cross-correlation walk.
TEMPLATE_HALF_RATIO = 0.4
# Half-width of the peak-snap window around the correlation-aligned point.
SNAP_HALF_RATIO = 0.12


@dataclass(frozen=True)
class PeriodMarks:
    """Cycle peaks within voiced regions.

    ``times`` are peak instants in seconds (sub-sample, strictly increasing
    within a segment), ``amplitudes`` the absolute waveform peak per cycle,
    and ``segment_ids`` the voiced-region index of each mark. Periods are
    only defined between marks of the same segment.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    segment_ids: np.ndarray

    def __len__(self) -> int:
        return self.times.size

    def periods_by_segment(self) -> list[np.ndarray]:
        out = []
        for seg in np.unique(self.segment_ids):
            t = self.times[self.segment_ids == seg]
            if t.size >= 2:
                out.append(np.diff(t))
        return out

    def periods(self) -> np.ndarray:
        chunks = self.periods_by_segment()
        if not chunks:
            return np.empty(0, dtype=np.float64)
        return np.concatenate(chunks)

    def amplitudes_by_segment(self) -> list[np.ndarray]:
        return [
            self.amplitudes[self.segment_ids == seg]
            for seg in np.unique(self.segment_ids)
        ]


def _voiced_runs(voiced: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive (first, last) frame-index pairs of consecutive voiced frames."""
    idx = np.nonzero(voiced)[0]
    if idx.size == 0:
        return []
    breaks = np.nonzero(np.diff(idx) > 1)[0]
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [idx.size - 1]))
    return [(int(idx[s]), int(idx[e])) for s, e in zip(starts, ends)]


def _refine_peak(x: np.ndarray, lo: int, hi: int) -> tuple[float, float]:
    """Sub-sample peak of |x| in [lo, hi) via parabolic interpolation.

    Returns (position in samples, peak magnitude).
    """
    lo = max(lo, 0)
    hi = min(hi, x.size)
    if hi <= lo:
        return float(lo), 0.0
    seg = np.abs(x[lo:hi])
    k = lo + int(np.argmax(seg))
    if k <= 0 or k >= x.size - 1:
        return float(k), float(abs(x[k]))
    sign = 1.0 if x[k] >= 0 else -1.0
    ym, yc, yp = sign * x[k - 1], sign * x[k], sign * x[k + 1]
    denom = ym - 2.0 * yc + yp
    if abs(denom) < 1e-30:
        return float(k), float(yc)
    delta = float(np.clip(0.5 * (ym - yp) / denom, -1.0, 1.0))
    height = yc - 0.25 * (ym - yp) * delta
    return k + delta, abs(height)


def _walk(x, sr, pos0, direction, run_times, run_f0, min_period, max_period, lo, hi):
    """March cycle by cycle from a seed peak, forward or backward.

    At each step a template around the current mark is cross-correlated with
    the signal one local period away; the best alignment is snapped to the
    nearest waveform peak under the period bounds.
    """
    out: list[tuple[float, float]] = []
    pos = pos0
    limit = int((hi - lo) / max(min_period, 1.0)) + 4
    while len(out) < limit:
        f0 = float(np.interp(pos / sr, run_times, run_f0))
        period = sr / f0
        half = max(2, int(round(TEMPLATE_HALF_RATIO * period)))
        lag_lo = max(int(np.ceil(MIN_PERIOD_RATIO * period)), int(np.ceil(min_period)))
        lag_hi = min(int(np.floor(MAX_PERIOD_RATIO * period)), int(np.floor(max_period)))
        if lag_hi <= lag_lo:
            break
        center = int(round(pos))
        t_lo, t_hi = center - half, center + half + 1
        if direction > 0:
            s_lo, s_hi = t_lo + lag_lo, t_hi + lag_hi
        else:
            s_lo, s_hi = t_lo - lag_hi, t_hi - lag_lo
        if t_lo < 0 or t_hi > x.size or s_lo < 0 or s_hi > x.size:
            break
        template = x[t_lo:t_hi]
        t_norm = float(np.sqrt(np.sum(template**2)))
        if t_norm <= 0.0:
            break
        search = x[s_lo:s_hi]
        corr = np.correlate(search, template, mode="valid")
        sq = np.concatenate(([0.0], np.cumsum(search**2)))
        w = template.size
        norms = np.sqrt(np.maximum(sq[w:] - sq[:-w], 0.0))
        scores = corr / np.maximum(norms * t_norm, 1e-30)
        idx = int(np.argmax(scores))
        lag = (lag_lo + idx) if direction > 0 else (lag_hi - idx)
        cand = center + direction * lag

        snap = max(1, int(round(SNAP_HALF_RATIO * period)))
        if direction > 0:
            w_lo = max(cand - snap, int(np.ceil(pos + min_period)))
            w_hi = min(cand + snap + 1, int(np.floor(pos + max_period)) + 1)
        else:
            w_lo = max(cand - snap, int(np.ceil(pos - max_period)))
            w_hi = min(cand + snap + 1, int(np.floor(pos - min_period)) + 1)
        new_pos, amp = _refine_peak(x, w_lo, w_hi)
        if amp <= 0.0:
            break
        if direction > 0 and new_pos <= pos:
            break
        if direction < 0 and new_pos >= pos:
            break
        if new_pos < lo - period or new_pos > hi + period:
            break
        out.append((new_pos, amp))
        pos = new_pos
    return out


def mark_periods(clip: AudioClip, track: PitchTrack) -> PeriodMarks:
    """Locate one waveform peak per pitch period inside voiced regions.

    Each voiced region is seeded at its strongest waveform peak; the walk
    then proceeds backward and forward one period at a time, seeded by the
    frame F0 and aligned by normalized cross-correlation of the current
    cycle shape. Consecutive marks in a segment keep periods within
    [1/ceiling, 1/floor].
    """
    if track.n_voiced == 0:
        raise NoVoicedFrames("pitch track has no voiced frames")
    sr = clip.sample_rate
    x = clip.samples
    step = int(round(track.frame_step * sr))
    min_period = sr / track.ceiling
    max_period = sr / track.floor

    times: list[float] = []
    amps: list[float] = []
    segs: list[int] = []

    for seg_id, (first, last) in enumerate(_voiced_runs(track.voiced)):
        run_times = track.times[first : last + 1]
        run_f0 = track.f0[first : last + 1]
        lo = max(0, int(round(run_times[0] * sr)) - step)
        hi = min(x.size, int(round(run_times[-1] * sr)) + step)
        if hi - lo < 2:
            continue
        seed_pos, seed_amp = _refine_peak(x, lo, hi)
        if seed_amp <= 0.0:
            continue
        back = _walk(x, sr, seed_pos, -1, run_times, run_f0, min_period, max_period, lo, hi)
        fwd = _walk(x, sr, seed_pos, +1, run_times, run_f0, min_period, max_period, lo, hi)
        chain = back[::-1] + [(seed_pos, seed_amp)] + fwd
        for pos, amp in chain:
            times.append(pos / sr)
            amps.append(amp)
            segs.append(seg_id)

    return PeriodMarks(
        times=np.asarray(times, dtype=np.float64),
        amplitudes=np.asarray(amps, dtype=np.float64),
        segment_ids=np.asarray(segs, dtype=np.int64),
    )
