"""Batch operator interface: extract, scale, synth, evaluate, triage, serve, report."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import learners, triage
from .acoustics import FeatureExtractionFailed, FeatureVector, extract_features
from .audio import AudioError, decode_wav
from .cohort import (
    InvalidTemplate,
    SubjectTemplate,
    TABLE2_TEMPLATE,
    cohort_from_document,
    cohort_to_document,
    eligible_subjects,
    synth_cohort,
)
from .learners.data import ALGORITHM_KINDS, DEFAULT_SEED
from .scaling import scale

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _write_output(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _feature_dict(vec) -> dict:
    return {k: float(v) for k, v in dataclasses.asdict(vec).items()}


# ---------------------------------------------------------------------------
# Subcommands

def cmd_extract(args) -> int:
    results = []
    failures = 0
    for path in args.wav_files:
        entry: dict = {"file": path}
        try:
            clip = decode_wav(Path(path).read_bytes())
            raw = extract_features(clip)
            entry["raw"] = _feature_dict(raw)
            entry["scaled"] = _feature_dict(scale(raw))
        except (OSError, AudioError, FeatureExtractionFailed) as exc:
            entry["error"] = str(exc)
            failures += 1
        results.append(entry)
    _write_output(json.dumps({"files": results}, indent=2), args.output)
    return EXIT_FAILURE if failures == len(results) else EXIT_OK


def cmd_scale(args) -> int:
    try:
        doc = json.loads(Path(args.features).read_text())
        raw = FeatureVector(**doc)
        scaled = scale(raw)
    except (OSError, TypeError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE
    _write_output(
        json.dumps({"raw": _feature_dict(raw), "scaled": _feature_dict(scaled)}, indent=2),
        args.output,
    )
    return EXIT_OK


def _load_template(name: str) -> list[SubjectTemplate]:
    if name == "table2":
        return list(TABLE2_TEMPLATE)
    doc = json.loads(Path(name).read_text())
    return [
        SubjectTemplate(
            subject_id=t["subject_id"],
            gender=t["gender"],
            label=int(t["label"]),
            n_samples=int(t["n_samples"]),
            n_days=int(t["n_days"]),
        )
        for t in doc
    ]


def cmd_synth(args) -> int:
    try:
        template = _load_template(args.template)
        cohort = synth_cohort(template, args.delta, args.seed)
    except (OSError, KeyError, InvalidTemplate) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE
    _write_output(json.dumps(cohort_to_document(cohort), indent=2), args.output)
    return EXIT_OK


def _evaluate_reports(cohort, genders, kinds, seed, low, high):
    reports = []
    for gender in genders:
        for kind in kinds:
            spec = learners.make_spec(kind, seed=seed)
            reports.append(triage.loo_evaluate(cohort, gender, spec, low, high))
    return reports


def _reports_document(reports, seed, low, high) -> dict:
    return {
        "seed": seed,
        "thresholds": {"low": low, "high": high},
        "reports": [
            {
                "gender": r.gender,
                "algorithm": r.algorithm,
                "c_correct": r.c_correct,
                "c_incorrect": r.c_incorrect,
                "c_undecided": r.c_undecided,
                "hit_rate": r.hit_rate,
                "claims": [dataclasses.asdict(c) for c in r.claims],
            }
            for r in reports
        ],
    }


def _render(reports, fmt: str, seed, low, high) -> str:
    if fmt == "csv":
        return triage.render_report_csv(reports)
    if fmt == "json":
        return json.dumps(_reports_document(reports, seed, low, high), indent=2)
    return triage.render_report(reports)


def cmd_evaluate(args) -> int:
    try:
        cohort = cohort_from_document(json.loads(Path(args.cohort).read_text()))
    except (OSError, KeyError, ValueError) as exc:
        sys.stderr.write(f"error: invalid cohort: {exc}\n")
        return EXIT_FAILURE
    kinds = ALGORITHM_KINDS if args.algorithms == ["all"] else args.algorithms
    try:
        reports = _evaluate_reports(
            cohort, args.genders, kinds, args.seed, args.low, args.high
        )
    except (triage.InsufficientSubjects, learners.SingleClassData) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE
    _write_output(_render(reports, args.format, args.seed, args.low, args.high), args.output)
    return EXIT_OK


def cmd_triage(args) -> int:
    try:
        cohort = cohort_from_document(json.loads(Path(args.cohort).read_text()))
    except (OSError, KeyError, ValueError) as exc:
        sys.stderr.write(f"error: invalid cohort: {exc}\n")
        return EXIT_FAILURE
    if args.subject not in cohort.subjects:
        sys.stderr.write(f"error: unknown subject {args.subject!r}\n")
        return EXIT_FAILURE
    target = cohort.subjects[args.subject]
    pool = [
        s
        for s in eligible_subjects(cohort, target.gender)
        if s.diagnosis is not None and s.subject_id != target.subject_id
    ]
    try:
        train = triage._training_dataset(cohort, pool)
        model = learners.fit(learners.make_spec(args.algorithm, seed=args.seed), train)
        claim = triage.triage_subject(cohort, args.subject, model, args.low, args.high)
    except (learners.EmptyData, learners.SingleClassData, triage.IneligibleSubject) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE
    _write_output(json.dumps(dataclasses.asdict(claim), indent=2), args.output)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    from .store import FeatureStore, StorageUnavailable

    try:
        store = FeatureStore(args.data_dir)
        app = create_app(store, bearer_token=args.token)
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (StorageUnavailable, OSError, SystemExit) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        doc = json.loads(Path(args.results).read_text())
        reports = [
            triage.EvalReport(
                gender=r["gender"],
                algorithm=r["algorithm"],
                c_correct=r["c_correct"],
                c_incorrect=r["c_incorrect"],
                c_undecided=r["c_undecided"],
                hit_rate=r["hit_rate"],
                claims=tuple(triage.Claim(**c) for c in r.get("claims", [])),
            )
            for r in doc["reports"]
        ]
    except (OSError, KeyError, TypeError, ValueError) as exc:
        sys.stderr.write(f"error: invalid results document: {exc}\n")
        return EXIT_FAILURE
    thresholds = doc.get("thresholds", {})
    _write_output(
        _render(reports, args.format, doc.get("seed"), thresholds.get("low"),
                thresholds.get("high")),
        args.output,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--format", choices=("text", "csv", "json"), default="text")
    parser.add_argument("--output", default=None, help="write to a file instead of stdout")


def _add_thresholds(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--low", type=float, default=triage.LOW_THRESHOLD)
    parser.add_argument("--high", type=float, default=triage.HIGH_THRESHOLD)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voicetriage",
        description="Voice-biomarker extraction and screening triage",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract features from WAV files")
    p.add_argument("wav_files", nargs="+")
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("scale", help="scale a raw feature JSON document")
    p.add_argument("features")
    _add_common(p)
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("synth", help="generate a synthetic cohort")
    p.add_argument("--template", default="table2", help='"table2" or a template JSON path')
    p.add_argument("--delta", type=float, default=0.0, help="class effect size (>= 0)")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("evaluate", help="run the leave-one-out evaluation")
    p.add_argument("cohort")
    p.add_argument("--genders", default="male,female")
    p.add_argument("--algorithms", default="all")
    _add_thresholds(p)
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("triage", help="claim for one subject")
    p.add_argument("cohort")
    p.add_argument("--subject", required=True)
    p.add_argument("--algorithm", default="RF", choices=ALGORITHM_KINDS)
    _add_thresholds(p)
    _add_common(p)
    p.set_defaults(func=cmd_triage)

    p = sub.add_parser("serve", help="run the ingestion service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--data-dir", required=True)
    p.add_argument("--token", default=None, help="require this bearer token")
    _add_common(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("report", help="re-render a saved evaluation JSON")
    p.add_argument("results")
    _add_common(p)
    p.set_defaults(func=cmd_report)

    return parser


def _validate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if getattr(args, "delta", None) is not None and args.delta < 0:
        parser.error("--delta must be >= 0")
    low = getattr(args, "low", None)
    high = getattr(args, "high", None)
    if low is not None and not (0.0 <= low <= high <= 1.0):
        parser.error("thresholds must satisfy 0 <= low <= high <= 1")
    if hasattr(args, "genders"):
        args.genders = [g.strip() for g in args.genders.split(",") if g.strip()]
        bad = [g for g in args.genders if g not in ("male", "female")]
        if bad or not args.genders:
            parser.error(f"unknown genders: {bad}")
    if hasattr(args, "algorithms") and isinstance(args.algorithms, str):
        kinds = [k.strip() for k in args.algorithms.split(",") if k.strip()]
        if kinds != ["all"]:
            bad = [k for k in kinds if k not in ALGORITHM_KINDS]
            if bad or not kinds:
                parser.error(
                    f"unknown algorithms {bad}; valid kinds: {', '.join(ALGORITHM_KINDS)}"
                )
        args.algorithms = kinds


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
