"""Versioned JSON persistence for fitted models.

Floats are serialized by shortest round-tripping repr, so a reloaded model
reproduces its predictions bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

from .data import AlgorithmSpec
from .models import _MODEL_CLASSES, Model

FORMAT_VERSION = 1


def model_to_document(model: Model) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "hyperparameters": model.spec.hyperparameters,
        "seed": model.spec.seed,
        "n_rows": model.n_rows,
        "params": model.to_params(),
    }


def model_from_document(doc: dict) -> Model:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    spec = AlgorithmSpec(
        kind=doc["kind"], hyperparameters=doc["hyperparameters"], seed=doc["seed"]
    )
    cls = _MODEL_CLASSES[spec.kind]
    return cls.from_params(spec, doc["n_rows"], doc["params"])


def save_model(model: Model, path) -> None:
    Path(path).write_text(json.dumps(model_to_document(model)))


def load_model(path) -> Model:
    return model_from_document(json.loads(Path(path).read_text()))
