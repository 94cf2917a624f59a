"""Acoustic voice-biomarker extraction."""

from .features import (
    FEATURE_NAMES,
    FeatureExtractionFailed,
    FeatureVector,
    extract_features,
)
from .formants import NoFormantFrames, f1_variance, first_formant_track
from .nuclei import syllable_nuclei
from .periods import PeriodMarks, mark_periods
from .perturbation import InsufficientCycles, jitter_local, shimmer_local
from .pitch import NoVoicedFrames, PitchTrack, f0_stats, track_pitch

__all__ = [
    "FEATURE_NAMES",
    "FeatureExtractionFailed",
    "FeatureVector",
    "InsufficientCycles",
    "NoFormantFrames",
    "NoVoicedFrames",
    "PeriodMarks",
    "PitchTrack",
    "extract_features",
    "f0_stats",
    "f1_variance",
    "first_formant_track",
    "jitter_local",
    "mark_periods",
    "shimmer_local",
    "syllable_nuclei",
    "track_pitch",
]
