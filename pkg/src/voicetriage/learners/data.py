"""Training data container and algorithm configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

ALGORITHM_KINDS = ("LR", "DT", "RF", "GBT", "KNN", "GNB", "SVM_RBF", "SVM_LINEAR")

DEFAULT_SEED = 17


class EmptyData(ValueError):
    """Dataset holds no rows."""


class SingleClassData(ValueError):
    """Training requires both labels to be present."""


class NonFiniteInput(ValueError):
    """Feature values must be finite."""


class Dataset:
    """Labeled feature rows in a canonical order.

    Rows are sorted by (subject_id, timestamp, feature values, label) on
    construction, so learners whose randomness is keyed by row index are
    unaffected by the order rows arrive in.
    """

    def __init__(self, X, y, subject_ids, timestamps=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        subject_ids = np.asarray(subject_ids, dtype=object)
        if X.ndim != 2:
            raise ValueError("X must be 2-dimensional")
        n = X.shape[0]
        if y.shape != (n,) or subject_ids.shape != (n,):
            raise ValueError("X, y, subject_ids must agree in length")
        if not np.all(np.isfinite(X)):
            raise NonFiniteInput("feature matrix contains non-finite values")
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must be 0 or 1")
        if timestamps is None:
            ts = np.zeros(n, dtype=np.int64)
        else:
            ts = np.asarray(timestamps, dtype=np.int64)
            if ts.shape != (n,):
                raise ValueError("timestamps must match row count")

        sid_str = subject_ids.astype(str)
        keys = [y, *[X[:, c] for c in range(X.shape[1] - 1, -1, -1)], ts, sid_str]
        order = np.lexsort(tuple(keys))
        self.X = np.ascontiguousarray(X[order])
        self.y = y[order]
        self.subject_ids = subject_ids[order]
        self.timestamps = ts[order]

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def class_counts(self) -> dict[int, int]:
        return {0: int(np.sum(self.y == 0)), 1: int(np.sum(self.y == 1))}

    def balanced_class_weights(self) -> dict[int, float]:
        """weight(c) = n_rows / (2 * count(c))."""
        counts = self.class_counts
        n = len(self)
        return {c: n / (2.0 * counts[c]) for c in (0, 1) if counts[c] > 0}

    def validate_for_training(self) -> None:
        if len(self) == 0:
            raise EmptyData("no training rows")
        counts = self.class_counts
        if counts[0] == 0 or counts[1] == 0:
            raise SingleClassData(f"both classes required, have {counts}")
        if len(self) < 2:
            raise EmptyData("need at least 2 rows")


def default_hyperparameters(kind: str) -> dict[str, Any]:
    if kind == "LR":
        return {"max_iter": 500, "class_weight": "balanced", "tol": 1e-6}
    if kind == "DT":
        return {"class_weight": "balanced"}
    if kind == "RF":
        return {"n_estimators": 500, "class_weight": "balanced", "max_features": 3}
    if kind == "GBT":
        return {"n_estimators": 300, "max_depth": 3, "learning_rate": 0.1}
    if kind == "KNN":
        return {"n_neighbors": 5, "weights": "distance"}
    if kind == "GNB":
        return {"variance_floor": 1e-9}
    if kind in ("SVM_RBF", "SVM_LINEAR"):
        return {"c": 1.0, "class_weight": "balanced", "tol": 1e-3, "max_iter": 200_000}
    raise ValueError(f"unknown algorithm kind {kind!r}; valid: {ALGORITHM_KINDS}")


@dataclass(frozen=True)
class AlgorithmSpec:
    """One classifier configuration: kind, hyperparameters, and seed."""

    kind: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.kind not in ALGORITHM_KINDS:
            raise ValueError(
                f"unknown algorithm kind {self.kind!r}; valid: {ALGORITHM_KINDS}"
            )
        merged = default_hyperparameters(self.kind)
        unknown = set(self.hyperparameters) - set(merged)
        if unknown:
            raise ValueError(f"unknown hyperparameters for {self.kind}: {sorted(unknown)}")
        merged.update(self.hyperparameters)
        object.__setattr__(self, "hyperparameters", merged)


def make_spec(kind: str, seed: int = DEFAULT_SEED, **overrides) -> AlgorithmSpec:
    return AlgorithmSpec(kind=kind, hyperparameters=overrides, seed=seed)
