"""voicetriage: acoustic biomarker extraction and subject-level screening triage.

Pipeline: decode 16 kHz PCM speech (``audio``), measure seven acoustic
features (``acoustics``), map them onto clinical normative anchors
(``scaling``), pool timestamped observations per subject (``cohort``,
``service``), and evaluate shallow classifiers with a leave-one-subject-out
protocol that issues per-subject risk claims (``learners``, ``triage``).
"""

from .audio import AudioClip, decode_wav, encode_wav
from .acoustics import FeatureVector, extract_features
from .scaling import ScaledFeatureVector, scale, unscale
from .cohort import Cohort, FeatureSample, Subject, eligibility, synth_cohort
from .learners import AlgorithmSpec, Dataset, fit, make_spec, predict_proba
from .triage import (
    Claim,
    EvalReport,
    decide_claim,
    hit_rate,
    loo_evaluate,
    mean_positive_probability,
    render_report,
    render_report_csv,
    triage_subject,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmSpec",
    "AudioClip",
    "Claim",
    "Cohort",
    "Dataset",
    "EvalReport",
    "FeatureSample",
    "FeatureVector",
    "ScaledFeatureVector",
    "Subject",
    "decide_claim",
    "decode_wav",
    "eligibility",
    "encode_wav",
    "extract_features",
    "fit",
    "hit_rate",
    "loo_evaluate",
    "make_spec",
    "mean_positive_probability",
    "predict_proba",
    "render_report",
    "render_report_csv",
    "scale",
    "synth_cohort",
    "triage_subject",
    "unscale",
]
