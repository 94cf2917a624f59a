"""Scaling rules: anchor exactness, affinity, invertibility."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voicetriage.acoustics import FeatureVector
from voicetriage.scaling import NonFiniteInput, ScaledFeatureVector, scale, unscale

NOMINAL = dict(
    articulation_rate=5.0,
    speaking_rate=120.0,
    jitter=0.01,
    shimmer=0.03,
    f0_mean=150.0,
    f0_sd=20.0,
    f1_variance=500.0,
)


def vec(**overrides) -> FeatureVector:
    return FeatureVector(**{**NOMINAL, **overrides})


@pytest.mark.parametrize(
    "field,raw,expected",
    [
        ("articulation_rate", 6.19, 0.0),
        ("articulation_rate", 3.095, -0.5),
        ("speaking_rate", 150.0, 1.0),
        ("jitter", 0.00106, 0.0),
        ("jitter", 0.02312, 1.0),
        ("shimmer", 0.05, 1.0),
        ("f0_mean", 75.0, 0.0),
        ("f0_mean", 300.0, 1.0),
        ("f0_sd", 0.0, 0.0),
        ("f1_variance", 200.0, 0.0),
        ("f1_variance", 1000.0, 1.0),
    ],
)
def test_anchor_values_exact(field, raw, expected):
    scaled = scale(vec(**{field: raw}))
    assert abs(getattr(scaled, field) - expected) < 1e-12


def test_scale_is_deterministic():
    a = scale(vec()).as_array()
    b = scale(vec()).as_array()
    assert np.array_equal(a, b)


def test_non_finite_rejected():
    with pytest.raises(NonFiniteInput):
        scale(vec(jitter=float("nan")))
    with pytest.raises(NonFiniteInput):
        scale(vec(f0_mean=float("inf")))
    with pytest.raises(NonFiniteInput):
        unscale(ScaledFeatureVector(0, 0, float("nan"), 0, 0, 0, 0))


def test_no_clamping_out_of_range_passes_through():
    scaled = scale(vec(f0_mean=400.0, jitter=0.1))
    assert scaled.f0_mean > 1.0
    assert scaled.jitter > 1.0
    scaled = scale(vec(articulation_rate=0.0, f1_variance=0.0))
    assert scaled.articulation_rate == -1.0
    assert scaled.f1_variance < 0.0


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
positive = st.floats(min_value=0.0, max_value=1e6, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(
    ar=finite, sr=finite, jit=positive, shim=positive,
    f0m=st.floats(min_value=50, max_value=500), f0s=positive, f1v=positive,
)
def test_round_trip_recovers_raw(ar, sr, jit, shim, f0m, f0s, f1v):
    raw = FeatureVector(ar, sr, jit, shim, f0m, f0s, f1v)
    back = unscale(scale(raw))
    for field in dataclasses.fields(raw):
        a = getattr(raw, field.name)
        b = getattr(back, field.name)
        assert abs(a - b) <= 1e-12 * max(abs(a), 1.0)


@settings(max_examples=100, deadline=None)
@given(lo=finite, delta=st.floats(min_value=1e-6, max_value=1e6, allow_nan=False))
def test_each_rule_strictly_increasing(lo, delta):
    hi = lo + delta
    for field in NOMINAL:
        low_scaled = getattr(scale(vec(**{field: lo})), field)
        high_scaled = getattr(scale(vec(**{field: hi})), field)
        assert high_scaled > low_scaled
