"""The seven-feature voice biomarker vector and its extraction pipeline."""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ..audio import AudioClip
from .formants import f1_variance
from .nuclei import syllable_nuclei
from .periods import mark_periods
from .perturbation import InsufficientCycles, jitter_local, shimmer_local
from .pitch import NoVoicedFrames, f0_stats, track_pitch

# Mean syllables per English word, used to estimate words from nuclei counts
# without speech recognition.
SYLLABLES_PER_WORD = 1.5

FEATURE_NAMES = (
    "articulation_rate",
    "speaking_rate",
    "jitter",
    "shimmer",
    "f0_mean",
    "f0_sd",
    "f1_variance",
)


class FeatureExtractionFailed(ValueError):
    """A feature could not be measured; ``feature`` names the culprit."""

    def __init__(self, feature: str, cause: Exception | str):
        self.feature = feature
        super().__init__(f"{feature}: {cause}")


@dataclass(frozen=True)
class FeatureVector:
    """Raw acoustic biomarkers of one recording.

    articulation_rate: syllables per second of phonation (pauses excluded)
    speaking_rate: estimated words per minute over total elapsed time
    jitter, shimmer: cycle-to-cycle perturbation fractions
    f0_mean, f0_sd: fundamental-frequency statistics in Hz
    f1_variance: variance of the first formant in Hz^2
    """

    articulation_rate: float
    speaking_rate: float
    jitter: float
    shimmer: float
    f0_mean: float
    f0_sd: float
    f1_variance: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=np.float64)

    @classmethod
    def from_array(cls, values) -> "FeatureVector":
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (len(FEATURE_NAMES),):
            raise ValueError(f"expected {len(FEATURE_NAMES)} values, got {values.shape}")
        return cls(*map(float, values))


def extract_features(clip: AudioClip) -> FeatureVector:
    """Extract all seven biomarkers from a clip.

    Measurement failures surface as FeatureExtractionFailed naming the
    feature that could not be computed.
    """
    track = track_pitch(clip)
    try:
        f0_mean, f0_sd = f0_stats(track)
    except NoVoicedFrames as exc:
        raise FeatureExtractionFailed("f0", exc) from exc

    try:
        marks = mark_periods(clip, track)
        jitter = jitter_local(marks)
    except (NoVoicedFrames, InsufficientCycles) as exc:
        raise FeatureExtractionFailed("jitter", exc) from exc
    try:
        shimmer = shimmer_local(marks)
    except InsufficientCycles as exc:
        raise FeatureExtractionFailed("shimmer", exc) from exc

    try:
        f1_var = f1_variance(clip, track)
    except ValueError as exc:
        raise FeatureExtractionFailed("f1_variance", exc) from exc

    count, phonation_time, total_time = syllable_nuclei(clip, track)
    if phonation_time <= 0.0:
        raise FeatureExtractionFailed("articulation_rate", "no phonation detected")
    if count == 0:
        raise FeatureExtractionFailed("articulation_rate", "no syllable nuclei found")
    articulation_rate = count / phonation_time
    speaking_rate = (count / SYLLABLES_PER_WORD) / (total_time / 60.0)

    return FeatureVector(
        articulation_rate=articulation_rate,
        speaking_rate=speaking_rate,
        jitter=jitter,
        shimmer=shimmer,
        f0_mean=f0_mean,
        f0_sd=f0_sd,
        f1_variance=f1_var,
    )
