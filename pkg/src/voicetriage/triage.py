"""Leave-one-subject-out triage protocol and diagnostic reports."""

from __future__ import annotations

import io as _io
import csv
from dataclasses import dataclass, field

import numpy as np

from . import learners
from .cohort import Cohort, eligibility, eligible_subjects

LOW_THRESHOLD = 0.4
HIGH_THRESHOLD = 0.6

CLAIM_POSITIVE = 1
CLAIM_NEGATIVE = 0
CLAIM_UNDECIDED = -1

REPORT_COLUMNS = ("Algorithm", "C_correct", "C_incorrect", "C_undecided", "Hit rate")


class EmptyList(ValueError):
    """No probabilities to average."""


class OutOfRange(ValueError):
    """A probability left [0, 1]."""


class InsufficientSubjects(ValueError):
    """Fewer than two eligible subjects of the requested gender."""


class IneligibleSubject(ValueError):
    """Subject does not meet the sampling threshold."""


class HoldoutLeakage(AssertionError):
    """A holdout subject's samples reached the training fold."""


@dataclass(frozen=True)
class Claim:
    """Per-subject triage outcome.

    ``mu_p1`` is None when the fold could not be evaluated (single-class
    training remainder); such subjects are counted as undecided.
    """

    subject_id: str
    mu_p1: float | None
    c: int
    n_samples_used: int


@dataclass(frozen=True)
class EvalReport:
    gender: str
    algorithm: str
    c_correct: int
    c_incorrect: int
    c_undecided: int
    hit_rate: float
    claims: tuple[Claim, ...] = field(default_factory=tuple)


def mean_positive_probability(probs) -> float:
    """Arithmetic mean of per-sample positive-class probabilities."""
    probs = np.asarray(list(probs), dtype=np.float64)
    if probs.size == 0:
        raise EmptyList("no probabilities given")
    if np.any(probs < 0.0) or np.any(probs > 1.0):
        raise OutOfRange("probabilities must lie in [0, 1]")
    return float(np.mean(probs))


def decide_claim(
    mu: float, low: float = LOW_THRESHOLD, high: float = HIGH_THRESHOLD
) -> int:
    """Map an averaged probability to a claim: 1, 0, or -1 (undecided).

    Values above ``high`` claim positive, below ``low`` claim negative, and
    the closed band [low, high] stays undecided.
    """
    if not 0.0 <= mu <= 1.0:
        raise OutOfRange(f"mu must lie in [0, 1], got {mu}")
    if mu > high:
        return CLAIM_POSITIVE
    if mu < low:
        return CLAIM_NEGATIVE
    return CLAIM_UNDECIDED


def hit_rate(c_correct: int, c_incorrect: int) -> float:
    """Correct decided claims over all decided claims; 0 when none decided."""
    if c_correct < 0 or c_incorrect < 0:
        raise ValueError("counts must be nonnegative")
    decided = c_correct + c_incorrect
    if decided == 0:
        return 0.0
    return c_correct / decided


def _training_dataset(cohort: Cohort, subjects) -> learners.Dataset:
    X, y, sids, ts = [], [], [], []
    for subject in subjects:
        for sample in cohort.samples_for(subject.subject_id):
            X.append(sample.vector)
            y.append(subject.diagnosis)
            sids.append(subject.subject_id)
            ts.append(int(sample.recorded_at.timestamp() * 1_000_000))
    return learners.Dataset(np.array(X), np.array(y), np.array(sids, dtype=object), np.array(ts))


def loo_evaluate(
    cohort: Cohort,
    gender: str,
    spec: learners.AlgorithmSpec,
    low: float = LOW_THRESHOLD,
    high: float = HIGH_THRESHOLD,
) -> EvalReport:
    """Hold out each eligible labeled subject of a gender in turn.

    The model trains on every sample of the remaining eligible same-gender
    subjects (labels inherited from the subject diagnosis), predicts the
    positive-class probability of each holdout sample, averages them, and
    applies the decision framework. Folds whose training remainder has a
    single class are tallied as undecided.
    """
    pool = [s for s in eligible_subjects(cohort, gender) if s.diagnosis is not None]
    if len(pool) < 2:
        raise InsufficientSubjects(
            f"need at least 2 eligible labeled {gender} subjects, have {len(pool)}"
        )

    claims: list[Claim] = []
    c_correct = c_incorrect = c_undecided = 0
    for holdout in pool:
        rest = [s for s in pool if s.subject_id != holdout.subject_id]
        train = _training_dataset(cohort, rest)
        if holdout.subject_id in set(train.subject_ids):
            raise HoldoutLeakage(holdout.subject_id)

        labels = {s.diagnosis for s in rest}
        if len(labels) < 2:
            claims.append(Claim(holdout.subject_id, None, CLAIM_UNDECIDED, 0))
            c_undecided += 1
            continue

        model = learners.fit(spec, train)
        queries = np.array([s.vector for s in cohort.samples_for(holdout.subject_id)])
        p1 = np.atleast_1d(model.predict_proba(queries))
        mu = mean_positive_probability(p1)
        c = decide_claim(mu, low, high)
        claims.append(Claim(holdout.subject_id, mu, c, int(p1.size)))
        if c == CLAIM_UNDECIDED:
            c_undecided += 1
        elif c == holdout.diagnosis:
            c_correct += 1
        else:
            c_incorrect += 1

    return EvalReport(
        gender=gender,
        algorithm=spec.kind,
        c_correct=c_correct,
        c_incorrect=c_incorrect,
        c_undecided=c_undecided,
        hit_rate=hit_rate(c_correct, c_incorrect),
        claims=tuple(claims),
    )


def triage_subject(
    cohort: Cohort,
    subject_id: str,
    model: learners.Model,
    low: float = LOW_THRESHOLD,
    high: float = HIGH_THRESHOLD,
) -> Claim:
    """Claim for one subject under an already-trained model."""
    check = eligibility(cohort, subject_id)
    if not check.eligible:
        raise IneligibleSubject(f"{subject_id}: {check.reason}")
    queries = np.array([s.vector for s in cohort.samples_for(subject_id)])
    p1 = np.atleast_1d(model.predict_proba(queries))
    mu = mean_positive_probability(p1)
    return Claim(subject_id, mu, decide_claim(mu, low, high), int(p1.size))


# ---------------------------------------------------------------------------
# Rendering

def _sorted_rows(reports) -> list[EvalReport]:
    return sorted(reports, key=lambda r: (-r.hit_rate, r.algorithm))


def render_report(reports) -> str:
    """Plain-text tables, one per gender, highest hit rate first."""
    reports = list(reports)
    genders = []
    for r in reports:
        if r.gender not in genders:
            genders.append(r.gender)
    lines: list[str] = []
    widths = (12, 10, 12, 12, 9)
    header = "  ".join(name.ljust(w) for name, w in zip(REPORT_COLUMNS, widths)).rstrip()
    if not genders:
        return header + "\n"
    for gender in genders:
        rows = _sorted_rows(r for r in reports if r.gender == gender)
        n_subjects = rows[0].c_correct + rows[0].c_incorrect + rows[0].c_undecided
        lines.append(f"== {gender} (n={n_subjects} subjects) ==")
        lines.append(header)
        for r in rows:
            cells = (
                r.algorithm,
                str(r.c_correct),
                str(r.c_incorrect),
                str(r.c_undecided),
                f"{r.hit_rate:.3f}",
            )
            lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
        lines.append("")
    return "\n".join(lines)


def render_report_csv(reports) -> str:
    """CSV emission: a Gender column followed by the report columns."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("Gender",) + REPORT_COLUMNS)
    reports = list(reports)
    genders = []
    for r in reports:
        if r.gender not in genders:
            genders.append(r.gender)
    for gender in genders:
        for r in _sorted_rows(r for r in reports if r.gender == gender):
            writer.writerow(
                (gender, r.algorithm, r.c_correct, r.c_incorrect, r.c_undecided,
                 f"{r.hit_rate:.3f}")
            )
    return buf.getvalue()
