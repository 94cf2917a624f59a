"""Sigmoid calibration of decision values (Platt's method, Newton variant)."""

from __future__ import annotations

import numpy as np


def fit_sigmoid(decision: np.ndarray, labels: np.ndarray) -> tuple[float, float]:
    """Fit A, B so that P(y=1|f) = 1 / (1 + exp(A*f + B)).

    ``labels`` are 0/1. Targets are the usual smoothed priors so the fit is
    well-defined even on separable data. Deterministic Newton iteration
    with backtracking line search.
    """
    decision = np.asarray(decision, dtype=np.float64)
    labels = np.asarray(labels)
    prior1 = float(np.sum(labels == 1))
    prior0 = float(np.sum(labels == 0))
    hi = (prior1 + 1.0) / (prior1 + 2.0)
    lo = 1.0 / (prior0 + 2.0)
    t = np.where(labels == 1, hi, lo)

    max_iter = 100
    min_step = 1e-10
    sigma = 1e-12
    eps = 1e-5

    A = 0.0
    B = float(np.log((prior0 + 1.0) / (prior1 + 1.0)))

    def objective(a: float, b: float) -> float:
        z = decision * a + b
        # log(1 + exp(-z)) written stably for either sign of z
        return float(np.sum(t * z + np.logaddexp(0.0, -z)))

    fval = objective(A, B)
    for _ in range(max_iter):
        z = decision * A + B
        p = np.empty_like(z)
        pos = z >= 0
        ez = np.exp(-z[pos])
        p[pos] = ez / (1.0 + ez)
        ez = np.exp(z[~pos])
        p[~pos] = 1.0 / (1.0 + ez)
        d2 = p * (1.0 - p)
        h11 = float(np.sum(decision * decision * d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h21 = float(np.sum(decision * d2))
        d1 = t - p
        g1 = float(np.sum(decision * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < eps and abs(g2) < eps:
            break
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= min_step:
            new_a = A + step * dA
            new_b = B + step * dB
            new_f = objective(new_a, new_b)
            if new_f < fval + 1e-4 * step * gd:
                A, B, fval = new_a, new_b, new_f
                break
            step /= 2.0
        else:
            break
    return A, B


def sigmoid_probability(decision: np.ndarray, a: float, b: float) -> np.ndarray:
    z = np.asarray(decision, dtype=np.float64) * a + b
    out = np.empty_like(z)
    pos = z >= 0
    ez = np.exp(-z[pos])
    out[pos] = ez / (1.0 + ez)
    ez = np.exp(z[~pos])
    out[~pos] = 1.0 / (1.0 + ez)
    return out
