"""Clinically anchored scaling of raw feature vectors.

Each rule is a fixed affine map against a published normative anchor; no
clamping is applied, so out-of-range measurements stay visible to the
classifiers.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .acoustics.features import FEATURE_NAMES, FeatureVector

# Normative anchors.
REFERENCE_ARTICULATION_RATE = 6.19  # syllables/s, cross-language English mean
CASUAL_SPEAKING_RATE_WPM = 150.0  # upper bound of relaxed conversation
JITTER_NORMAL_RANGE = (0.00106, 0.02312)
SHIMMER_NORMAL_MAX = 0.05
F0_RANGE_HZ = (75.0, 300.0)
F1_RANGE_HZ = (200.0, 1000.0)


class NonFiniteInput(ValueError):
    """A feature value was NaN or infinite."""


@dataclass(frozen=True)
class ScaledFeatureVector:
    """Dimensionless feature vector, same field order as FeatureVector."""

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
    def from_array(cls, values) -> "ScaledFeatureVector":
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (len(FEATURE_NAMES),):
            raise ValueError(f"expected {len(FEATURE_NAMES)} values, got {values.shape}")
        return cls(*map(float, values))


def scale(raw: FeatureVector) -> ScaledFeatureVector:
    """Apply the six normative scaling rules to a raw vector."""
    values = raw.as_array()
    if not np.all(np.isfinite(values)):
        bad = FEATURE_NAMES[int(np.argmin(np.isfinite(values)))]
        raise NonFiniteInput(f"non-finite value for {bad}")
    jit_lo, jit_hi = JITTER_NORMAL_RANGE
    f0_lo, f0_hi = F0_RANGE_HZ
    f1_lo, f1_hi = F1_RANGE_HZ
    return ScaledFeatureVector(
        articulation_rate=(raw.articulation_rate - REFERENCE_ARTICULATION_RATE)
        / REFERENCE_ARTICULATION_RATE,
        speaking_rate=raw.speaking_rate / CASUAL_SPEAKING_RATE_WPM,
        jitter=(raw.jitter - jit_lo) / (jit_hi - jit_lo),
        shimmer=raw.shimmer / SHIMMER_NORMAL_MAX,
        f0_mean=(raw.f0_mean - f0_lo) / (f0_hi - f0_lo),
        f0_sd=raw.f0_sd / (f0_hi - f0_lo),
        f1_variance=(raw.f1_variance - f1_lo) / (f1_hi - f1_lo),
    )


def unscale(scaled: ScaledFeatureVector) -> FeatureVector:
    """Invert the affine scaling rules."""
    values = scaled.as_array()
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput("non-finite scaled value")
    jit_lo, jit_hi = JITTER_NORMAL_RANGE
    f0_lo, f0_hi = F0_RANGE_HZ
    f1_lo, f1_hi = F1_RANGE_HZ
    return FeatureVector(
        articulation_rate=scaled.articulation_rate * REFERENCE_ARTICULATION_RATE
        + REFERENCE_ARTICULATION_RATE,
        speaking_rate=scaled.speaking_rate * CASUAL_SPEAKING_RATE_WPM,
        jitter=scaled.jitter * (jit_hi - jit_lo) + jit_lo,
        shimmer=scaled.shimmer * SHIMMER_NORMAL_MAX,
        f0_mean=scaled.f0_mean * (f0_hi - f0_lo) + f0_lo,
        f0_sd=scaled.f0_sd * (f0_hi - f0_lo),
        f1_variance=scaled.f1_variance * (f1_hi - f1_lo) + f1_lo,
    )
