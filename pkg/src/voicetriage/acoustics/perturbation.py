"""Local jitter and shimmer from marked glottal cycles."""

from __future__ import annotations

import numpy as np

from .periods import PeriodMarks


class InsufficientCycles(ValueError):
    """Too few marked cycles to measure cycle-to-cycle variation."""


def jitter_local(marks: PeriodMarks) -> float:
    """Mean absolute difference of consecutive periods over the mean period.

    Dimensionless fraction. Period differences are taken within voiced
    segments only; periods never span a voicing gap.
    """
    periods = marks.periods()
    diffs = [np.abs(np.diff(p)) for p in marks.periods_by_segment() if p.size >= 2]
    if periods.size < 2 or not diffs:
        raise InsufficientCycles("jitter needs at least 2 consecutive periods")
    mean_abs_diff = float(np.mean(np.concatenate(diffs)))
    return mean_abs_diff / float(np.mean(periods))


def shimmer_local(marks: PeriodMarks) -> float:
    """Mean absolute difference of consecutive cycle peak amplitudes over the
    mean amplitude. Dimensionless fraction, differenced within segments."""
    if len(marks) < 2:
        raise InsufficientCycles("shimmer needs at least 2 marked cycles")
    diffs = [np.abs(np.diff(a)) for a in marks.amplitudes_by_segment() if a.size >= 2]
    if not diffs:
        raise InsufficientCycles("shimmer needs 2 cycles in one voiced segment")
    mean_amp = float(np.mean(marks.amplitudes))
    if mean_amp <= 0.0:
        raise InsufficientCycles("cycle amplitudes are all zero")
    return float(np.mean(np.concatenate(diffs))) / mean_amp
