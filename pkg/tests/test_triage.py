"""Decision framework, LOO harness, and report rendering."""

import math
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voicetriage import learners
from voicetriage.cohort import Cohort, FeatureSample, Subject
from voicetriage.triage import (
    Claim,
    EmptyList,
    EvalReport,
    IneligibleSubject,
    InsufficientSubjects,
    OutOfRange,
    decide_claim,
    hit_rate,
    loo_evaluate,
    mean_positive_probability,
    render_report,
    render_report_csv,
    triage_subject,
)

UTC = timezone.utc


def toy_cohort(offsets=(0.0, 0.2, 3.0, 3.2), labels=(0, 0, 1, 1), gender="male",
               samples_per_subject=6, spread=0.05):
    """Small hand-checkable cohort: one Gaussian-free cluster per subject.

    Each subject gets fixed, deterministic sample offsets (no RNG), two
    samples per day across three days so everyone is eligible.
    """
    subjects = [
        Subject(f"T{i+1}", gender, label) for i, label in enumerate(labels)
    ]
    cohort = Cohort(subjects)
    base = datetime(2024, 10, 1, 9, 0, tzinfo=UTC)
    deltas = np.linspace(-spread, spread, samples_per_subject)
    for subject, center in zip(subjects, offsets):
        for k, d in enumerate(deltas):
            vector = np.full(7, center) + d
            recorded = base + timedelta(days=k // 2, hours=k % 2)
            cohort.add_sample(FeatureSample(subject.subject_id, "dev", recorded, vector))
    return cohort


# ---------------------------------------------------------------------------
# Elementary operations

def test_mean_positive_probability_hand_values():
    assert mean_positive_probability([0.6, 0.8]) == pytest.approx(0.7)
    assert mean_positive_probability([0.123]) == 0.123


def test_mean_matches_direct_summation():
    rng = np.random.default_rng(0)
    probs = rng.uniform(0, 1, 100)
    expected = math.fsum(probs) / len(probs)
    assert abs(mean_positive_probability(probs) - expected) < 1e-12


def test_mean_errors():
    with pytest.raises(EmptyList):
        mean_positive_probability([])
    with pytest.raises(OutOfRange):
        mean_positive_probability([0.5, 1.2])


def test_decide_claim_rules():
    assert decide_claim(0.65) == 1
    assert decide_claim(0.35) == 0
    assert decide_claim(0.60) == -1
    assert decide_claim(0.40) == -1
    assert decide_claim(np.nextafter(0.6, 1.0)) == 1
    assert decide_claim(np.nextafter(0.4, 0.0)) == 0
    with pytest.raises(OutOfRange):
        decide_claim(1.5)
    with pytest.raises(OutOfRange):
        decide_claim(-0.1)


@settings(max_examples=300, deadline=None)
@given(mu=st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_decide_claim_is_step_function(mu):
    c = decide_claim(mu)
    if mu > 0.6:
        assert c == 1
    elif mu < 0.4:
        assert c == 0
    else:
        assert c == -1


def test_hit_rate_published_rows():
    assert hit_rate(7, 3) == pytest.approx(0.7)
    assert hit_rate(0, 2) == 0.0
    assert hit_rate(0, 0) == 0.0
    with pytest.raises(ValueError):
        hit_rate(-1, 0)


# ---------------------------------------------------------------------------
# LOO harness

def test_loo_on_separated_toy_cohort_perfect():
    cohort = toy_cohort()
    report = loo_evaluate(cohort, "male", learners.make_spec("GNB"))
    assert report.c_correct == 4
    assert report.c_incorrect == 0
    assert report.c_undecided == 0
    assert report.hit_rate == 1.0
    for claim in report.claims:
        assert claim.n_samples_used == 6


def brute_force_gnb_mu(cohort, holdout_id, floor=1e-9):
    """Independent posterior arithmetic in plain Python."""
    train_rows, train_labels = [], []
    for subject in cohort.subjects.values():
        if subject.subject_id == holdout_id:
            continue
        for s in cohort.samples_for(subject.subject_id):
            train_rows.append(list(s.vector))
            train_labels.append(subject.diagnosis)
    stats = {}
    n = len(train_rows)
    for c in (0, 1):
        rows = [r for r, lbl in zip(train_rows, train_labels) if lbl == c]
        means = [sum(col) / len(rows) for col in zip(*rows)]
        variances = [
            max(sum((v - m) ** 2 for v in col) / len(rows), floor)
            for col, m in zip(zip(*rows), means)
        ]
        stats[c] = (means, variances, len(rows) / n)
    p1s = []
    for s in cohort.samples_for(holdout_id):
        logps = {}
        for c in (0, 1):
            means, variances, prior = stats[c]
            ll = math.log(prior)
            for v, m, var in zip(s.vector, means, variances):
                ll += -0.5 * (math.log(2 * math.pi * var) + (v - m) ** 2 / var)
            logps[c] = ll
        m = max(logps.values())
        p1s.append(
            math.exp(logps[1] - m) / (math.exp(logps[0] - m) + math.exp(logps[1] - m))
        )
    return math.fsum(p1s) / len(p1s)


def test_loo_mu_matches_brute_force_gnb():
    cohort = toy_cohort(offsets=(0.0, 0.4, 1.6, 2.1), spread=0.3)
    report = loo_evaluate(cohort, "male", learners.make_spec("GNB"))
    for claim in report.claims:
        expected = brute_force_gnb_mu(cohort, claim.subject_id)
        assert claim.mu_p1 == pytest.approx(expected, abs=1e-9)


def test_loo_never_trains_on_holdout(monkeypatch):
    cohort = toy_cohort()
    seen = []
    original = learners.fit

    def spy(spec, data):
        seen.append(set(data.subject_ids))
        return original(spec, data)

    monkeypatch.setattr(learners, "fit", spy)
    report = loo_evaluate(cohort, "male", learners.make_spec("GNB"))
    held = [c.subject_id for c in report.claims]
    assert len(seen) == len(held)
    for holdout_id, train_ids in zip(held, seen):
        assert holdout_id not in train_ids


def test_loo_single_class_remainder_counts_undecided():
    cohort = toy_cohort(offsets=(0.0, 3.0), labels=(0, 1))
    report = loo_evaluate(cohort, "male", learners.make_spec("GNB"))
    assert report.c_undecided == 2
    assert report.c_correct == report.c_incorrect == 0
    assert report.hit_rate == 0.0
    assert all(c.mu_p1 is None and c.c == -1 for c in report.claims)


def test_loo_partition_invariant():
    cohort = toy_cohort(offsets=(0.0, 0.1, 0.2, 0.3), labels=(0, 1, 0, 1), spread=0.5)
    report = loo_evaluate(cohort, "male", learners.make_spec("KNN"))
    total = report.c_correct + report.c_incorrect + report.c_undecided
    assert total == len(report.claims) == 4


def test_loo_insufficient_subjects():
    cohort = toy_cohort(offsets=(0.0,), labels=(1,))
    with pytest.raises(InsufficientSubjects):
        loo_evaluate(cohort, "male", learners.make_spec("GNB"))
    with pytest.raises(InsufficientSubjects):
        loo_evaluate(toy_cohort(), "female", learners.make_spec("GNB"))


def test_loo_ignores_unlabeled_subjects():
    cohort = toy_cohort()
    cohort.add_subject(Subject("U1", "male", None))
    base = datetime(2024, 10, 1, 9, 0, tzinfo=UTC)
    for k in range(6):
        cohort.add_sample(
            FeatureSample("U1", "dev", base + timedelta(days=k // 2, hours=k % 2),
                          np.full(7, 1.5))
        )
    report = loo_evaluate(cohort, "male", learners.make_spec("GNB"))
    assert {c.subject_id for c in report.claims} == {"T1", "T2", "T3", "T4"}


# ---------------------------------------------------------------------------
# Per-subject triage

def test_triage_subject_knn_duplicate_of_diabetic():
    cohort = toy_cohort()
    pool = [s for s in cohort.subjects.values() if s.subject_id != "T3"]
    from voicetriage.triage import _training_dataset

    model = learners.fit(learners.make_spec("KNN"), _training_dataset(cohort, pool))
    # T3's samples coincide with nothing in training, but T4's cluster is near;
    # clone T4's exact samples onto a new subject and triage it
    cohort.add_subject(Subject("C1", "male", None))
    for s in cohort.samples_for("T4"):
        cohort.add_sample(FeatureSample("C1", "dev", s.recorded_at, s.vector))
    claim = triage_subject(cohort, "C1", model)
    assert claim.mu_p1 == 1.0
    assert claim.c == 1


def test_triage_subject_requires_eligibility():
    cohort = toy_cohort()
    cohort.add_subject(Subject("L1", "male", None))
    cohort.add_sample(
        FeatureSample("L1", "dev", datetime(2024, 10, 1, tzinfo=UTC), np.zeros(7))
    )
    from voicetriage.triage import _training_dataset

    labeled = [s for s in cohort.subjects.values() if s.diagnosis is not None]
    model = learners.fit(learners.make_spec("GNB"), _training_dataset(cohort, labeled))
    with pytest.raises(IneligibleSubject):
        triage_subject(cohort, "L1", model)


def test_claim_invariant_under_sample_duplication():
    cohort = toy_cohort()
    pool = [s for s in cohort.subjects.values() if s.subject_id != "T3"]
    from voicetriage.triage import _training_dataset

    model = learners.fit(learners.make_spec("GNB"), _training_dataset(cohort, pool))
    before = triage_subject(cohort, "T3", model)
    for s in list(cohort.samples_for("T3")):
        cohort.add_sample(
            FeatureSample("T3", "dev-copy", s.recorded_at + timedelta(seconds=1), s.vector)
        )
    after = triage_subject(cohort, "T3", model)
    assert after.mu_p1 == pytest.approx(before.mu_p1, abs=1e-12)
    assert after.c == before.c


# ---------------------------------------------------------------------------
# Rendering

GOLDEN_TEXT = """\
== male (n=17 subjects) ==
Algorithm     C_correct   C_incorrect   C_undecided   Hit rate
RF            7           3             7             0.700
DT            6           3             8             0.667
LR            0           2             15            0.000
"""


def test_render_report_golden():
    reports = [
        EvalReport("male", "RF", 7, 3, 7, hit_rate(7, 3)),
        EvalReport("male", "LR", 0, 2, 15, hit_rate(0, 2)),
        EvalReport("male", "DT", 6, 3, 8, hit_rate(6, 3)),
    ]
    assert render_report(reports) == GOLDEN_TEXT


def test_render_sorts_by_hit_rate_then_name():
    reports = [
        EvalReport("male", "B", 6, 4, 0, 0.6),
        EvalReport("male", "A", 7, 3, 0, 0.7),
        EvalReport("male", "C", 7, 3, 0, 0.7),
    ]
    lines = render_report(reports).splitlines()
    order = [ln.split()[0] for ln in lines[2:5]]
    assert order == ["A", "C", "B"]


def test_render_empty_is_header_only():
    out = render_report([])
    assert out.splitlines()[0].split() == [
        "Algorithm", "C_correct", "C_incorrect", "C_undecided", "Hit", "rate"
    ]


def test_render_csv():
    reports = [
        EvalReport("male", "RF", 7, 3, 7, 0.7),
        EvalReport("female", "DT", 3, 2, 2, 0.6),
    ]
    out = render_report_csv(reports)
    lines = out.strip().split("\n")
    assert lines[0] == "Gender,Algorithm,C_correct,C_incorrect,C_undecided,Hit rate"
    assert lines[1] == "male,RF,7,3,7,0.700"
    assert lines[2] == "female,DT,3,2,2,0.600"
