"""Subject records, sampling eligibility, and synthetic cohort generation."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone

import numpy as np

from .acoustics.features import FEATURE_NAMES

GENDERS = ("male", "female")

# Eligibility: enough sampling to smooth out within-day physiology.
MIN_DISTINCT_DAYS = 3
MIN_SAMPLES_PER_DAY = 2

# Synthetic generator geometry (in scaled feature space). The class effect
# loads on the jitter axis so axis-aligned learners see the full separation.
SYNTH_BASE_MEAN = np.array([0.0, 0.75, 0.35, 0.5, 0.3, 0.15, 0.3])
SYNTH_DIRECTION = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0])
SYNTH_SAMPLE_STD = 0.35
SYNTH_WINDOW_DAYS = 30
SYNTH_BASE_DATE = date(2024, 10, 1)


class UnknownSubject(KeyError):
    """Subject id not present in the cohort."""


class InvalidTemplate(ValueError):
    """Synthesis template is empty or inconsistent."""


@dataclass(frozen=True)
class Subject:
    subject_id: str
    gender: str
    diagnosis: int | None  # 1 diabetic, 0 not, None unknown

    def __post_init__(self):
        if self.gender not in GENDERS:
            raise ValueError(f"gender must be one of {GENDERS}")
        if self.diagnosis not in (0, 1, None):
            raise ValueError("diagnosis must be 0, 1, or None")


@dataclass(frozen=True)
class FeatureSample:
    subject_id: str
    device_id: str
    recorded_at: datetime  # timezone-aware UTC
    vector: np.ndarray  # scaled features, length 7

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=np.float64)
        object.__setattr__(self, "vector", vec)
        if vec.shape != (len(FEATURE_NAMES),):
            raise ValueError(f"vector must have {len(FEATURE_NAMES)} entries")
        if not np.all(np.isfinite(vec)):
            raise ValueError("vector must be finite")
        if self.recorded_at.tzinfo is None:
            raise ValueError("recorded_at must be timezone-aware")
        object.__setattr__(self, "recorded_at", self.recorded_at.astimezone(timezone.utc))


class Cohort:
    """Subjects plus their timestamped feature samples."""

    def __init__(self, subjects, samples=()):
        self.subjects: dict[str, Subject] = {}
        for s in subjects:
            if s.subject_id in self.subjects:
                raise ValueError(f"duplicate subject id {s.subject_id!r}")
            self.subjects[s.subject_id] = s
        self._samples: dict[str, list[FeatureSample]] = {sid: [] for sid in self.subjects}
        for sample in samples:
            self.add_sample(sample)

    def add_subject(self, subject: Subject) -> None:
        if subject.subject_id in self.subjects:
            raise ValueError(f"duplicate subject id {subject.subject_id!r}")
        self.subjects[subject.subject_id] = subject
        self._samples[subject.subject_id] = []

    def add_sample(self, sample: FeatureSample) -> None:
        if sample.subject_id not in self.subjects:
            raise UnknownSubject(sample.subject_id)
        self._samples[sample.subject_id].append(sample)

    def samples_for(self, subject_id: str) -> list[FeatureSample]:
        if subject_id not in self.subjects:
            raise UnknownSubject(subject_id)
        return sorted(self._samples[subject_id], key=lambda s: (s.recorded_at, s.device_id))

    def all_samples(self) -> list[FeatureSample]:
        out = []
        for sid in sorted(self.subjects):
            out.extend(self.samples_for(sid))
        return out

    def subjects_by_gender(self, gender: str) -> list[Subject]:
        return sorted(
            (s for s in self.subjects.values() if s.gender == gender),
            key=lambda s: s.subject_id,
        )

    def __len__(self) -> int:
        return len(self.subjects)


@dataclass(frozen=True)
class Eligibility:
    eligible: bool
    reason: str | None = None


def eligibility(cohort: Cohort, subject_id: str) -> Eligibility:
    """Eligible iff at least 3 distinct UTC days hold 2+ samples each."""
    samples = cohort.samples_for(subject_id)
    if not samples:
        return Eligibility(False, "no_samples")
    per_day: dict[date, int] = {}
    for s in samples:
        day = s.recorded_at.date()
        per_day[day] = per_day.get(day, 0) + 1
    qualifying = sum(1 for n in per_day.values() if n >= MIN_SAMPLES_PER_DAY)
    if qualifying < MIN_DISTINCT_DAYS:
        return Eligibility(False, "insufficient_days_with_two")
    return Eligibility(True)


def eligible_subjects(cohort: Cohort, gender: str | None = None) -> list[Subject]:
    pool = cohort.subjects_by_gender(gender) if gender else sorted(
        cohort.subjects.values(), key=lambda s: s.subject_id
    )
    return [s for s in pool if eligibility(cohort, s.subject_id).eligible]


# ---------------------------------------------------------------------------
# Synthesis

@dataclass(frozen=True)
class SubjectTemplate:
    subject_id: str
    gender: str
    label: int  # 1 diabetic, 0 not
    n_samples: int
    n_days: int


# Bundled 24-subject reference template: per-subject sample and day counts
# for 17 male (11 positive / 6 negative) and 7 female (3 / 4) subjects.
TABLE2_TEMPLATE: tuple[SubjectTemplate, ...] = tuple(
    SubjectTemplate(sid, gender, label, n_samples, n_days)
    for sid, gender, label, n_samples, n_days in [
        ("M1", "male", 1, 396, 28),
        ("M2", "male", 1, 201, 30),
        ("M3", "male", 1, 101, 28),
        ("M4", "male", 1, 89, 20),
        ("M5", "male", 1, 83, 24),
        ("M6", "male", 1, 59, 20),
        ("M7", "male", 1, 29, 15),
        ("M8", "male", 1, 22, 11),
        ("M9", "male", 1, 16, 8),
        ("M10", "male", 1, 12, 6),
        ("M11", "male", 1, 11, 7),
        ("M12", "male", 0, 181, 25),
        ("M13", "male", 0, 163, 28),
        ("M14", "male", 0, 147, 29),
        ("M15", "male", 0, 73, 15),
        ("M16", "male", 0, 42, 11),
        ("M17", "male", 0, 30, 13),
        ("F1", "female", 1, 56, 17),
        ("F2", "female", 1, 29, 16),
        ("F3", "female", 1, 17, 4),
        ("F4", "female", 0, 194, 18),
        ("F5", "female", 0, 113, 9),
        ("F6", "female", 0, 62, 19),
        ("F7", "female", 0, 40, 10),
    ]
)


def _spread_counts(n_samples: int, n_days: int) -> list[int]:
    """Distribute samples uniformly over days, at least 2 per day when possible."""
    base = n_samples // n_days
    rem = n_samples % n_days
    return [base + (1 if i < rem else 0) for i in range(n_days)]


def synth_cohort(
    template,
    separation: float,
    seed: int,
    base_date: date = SYNTH_BASE_DATE,
) -> Cohort:
    """Draw a synthetic cohort with a controlled class effect size.

    Each subject gets a Gaussian cloud of scaled vectors around a subject
    mean: the class mean shifted by ``separation`` along a fixed unit
    direction for label 1, plus a per-subject identity offset with standard
    deviation separation / 4. Timestamps spread each subject's samples
    uniformly over its template day count inside a 30-day window.
    """
    template = list(template)
    if not template:
        raise InvalidTemplate("template is empty")
    if separation < 0:
        raise InvalidTemplate("separation must be nonnegative")
    for t in template:
        if t.n_samples < 1 or t.n_days < 1 or t.n_days > SYNTH_WINDOW_DAYS:
            raise InvalidTemplate(f"bad counts for {t.subject_id!r}")
        if t.label not in (0, 1):
            raise InvalidTemplate(f"bad label for {t.subject_id!r}")

    rng = np.random.default_rng(seed)
    subjects = [Subject(t.subject_id, t.gender, t.label) for t in template]
    cohort = Cohort(subjects)
    dim = len(FEATURE_NAMES)

    for t in template:
        offset = rng.normal(0.0, separation / 4.0, dim) if separation > 0 else np.zeros(dim)
        mean = SYNTH_BASE_MEAN + t.label * separation * SYNTH_DIRECTION + offset
        vectors = mean + rng.normal(0.0, SYNTH_SAMPLE_STD, (t.n_samples, dim))

        day_offsets = np.sort(rng.choice(SYNTH_WINDOW_DAYS, size=t.n_days, replace=False))
        counts = _spread_counts(t.n_samples, t.n_days)
        idx = 0
        for day_offset, count in zip(day_offsets, counts):
            seconds = np.sort(rng.integers(6 * 3600, 22 * 3600, size=count))
            for s in seconds:
                recorded = datetime.combine(
                    base_date + timedelta(days=int(day_offset)),
                    datetime.min.time(),
                    tzinfo=timezone.utc,
                ) + timedelta(seconds=int(s))
                cohort.add_sample(
                    FeatureSample(
                        subject_id=t.subject_id,
                        device_id=f"dev-{t.subject_id}",
                        recorded_at=recorded,
                        vector=vectors[idx],
                    )
                )
                idx += 1
    return cohort


# ---------------------------------------------------------------------------
# JSON interchange

COHORT_SCHEMA_VERSION = 1


def cohort_to_document(cohort: Cohort) -> dict:
    return {
        "schema_version": COHORT_SCHEMA_VERSION,
        "subjects": [
            {
                "subject_id": s.subject_id,
                "gender": s.gender,
                "diagnosis": s.diagnosis,
            }
            for s in sorted(cohort.subjects.values(), key=lambda s: s.subject_id)
        ],
        "samples": [
            {
                "subject_id": s.subject_id,
                "device_id": s.device_id,
                "recorded_at": s.recorded_at.isoformat(),
                "vector": s.vector.tolist(),
            }
            for s in cohort.all_samples()
        ],
    }


def cohort_from_document(doc: dict) -> Cohort:
    version = doc.get("schema_version")
    if version != COHORT_SCHEMA_VERSION:
        raise ValueError(f"unsupported cohort schema version {version!r}")
    subjects = [
        Subject(s["subject_id"], s["gender"], s["diagnosis"]) for s in doc["subjects"]
    ]
    samples = [
        FeatureSample(
            subject_id=s["subject_id"],
            device_id=s["device_id"],
            recorded_at=datetime.fromisoformat(s["recorded_at"]),
            vector=np.asarray(s["vector"], dtype=np.float64),
        )
        for s in doc["samples"]
    ]
    return Cohort(subjects, samples)
