"""The eight shallow classifiers behind one fit / predict-probability surface.

Every learner is deterministic given (spec, data): tree ensembles key their
randomness by (seed, tree index) over the dataset's canonical row order,
and the remaining learners have no random component.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from . import _tree
from ._platt import fit_sigmoid, sigmoid_probability
from ._svm import smo_solve
from .data import AlgorithmSpec, Dataset, NonFiniteInput

_UNLIMITED_DEPTH = 1 << 40


def _query_matrix(x) -> tuple[np.ndarray, bool]:
    if hasattr(x, "as_array"):
        x = x.as_array()
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError("query must be a vector or a matrix of rows")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("query contains non-finite values")
    return np.ascontiguousarray(arr), single


class Model:
    """Fitted classifier; subclasses fill in parameters."""

    def __init__(self, spec: AlgorithmSpec, n_rows: int):
        self.spec = spec
        self.n_rows = n_rows

    @property
    def kind(self) -> str:
        return self.spec.kind

    def predict_proba(self, x):
        """Probability of label 1 for one vector or each row of a matrix."""
        queries, single = _query_matrix(x)
        p1 = np.clip(self._proba(queries), 0.0, 1.0)
        return float(p1[0]) if single else p1

    def _proba(self, queries: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_params(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_params(cls, spec: AlgorithmSpec, n_rows: int, params: dict) -> "Model":
        raise NotImplementedError


def _class_weights(data: Dataset, hyper: dict) -> np.ndarray:
    """Per-row sample weights under the configured class weighting."""
    if hyper.get("class_weight") == "balanced":
        cw = data.balanced_class_weights()
        return np.array([cw[int(c)] for c in data.y], dtype=np.float64)
    return np.ones(len(data), dtype=np.float64)


# ---------------------------------------------------------------------------
# Logistic regression

class LogisticModel(Model):
    def __init__(self, spec, n_rows, weights):
        super().__init__(spec, n_rows)
        self.weights = np.asarray(weights, dtype=np.float64)  # [coef..., bias]

    def _proba(self, queries):
        z = queries @ self.weights[:-1] + self.weights[-1]
        return expit(z)

    def to_params(self):
        return {"weights": self.weights.tolist()}

    @classmethod
    def from_params(cls, spec, n_rows, params):
        return cls(spec, n_rows, params["weights"])


def _fit_lr(spec: AlgorithmSpec, data: Dataset) -> LogisticModel:
    hyper = spec.hyperparameters
    n, d = data.X.shape
    Z = np.hstack([data.X, np.ones((n, 1))])
    s = _class_weights(data, hyper)
    s = s / s.sum()
    y_pm = 2.0 * data.y - 1.0

    # Fixed step below the curvature bound of the weighted logistic loss.
    lipschitz = 0.25 * float(np.max(np.sum(Z**2, axis=1)))
    step = 1.0 / max(lipschitz, 1e-12)

    w = np.zeros(d + 1)
    prev_loss = np.inf
    for _ in range(int(hyper["max_iter"])):
        margins = y_pm * (Z @ w)
        loss = float(np.sum(s * np.logaddexp(0.0, -margins)))
        if abs(prev_loss - loss) < hyper["tol"]:
            break
        prev_loss = loss
        grad = -Z.T @ (s * y_pm * expit(-margins))
        w -= step * grad
    return LogisticModel(spec, n, w)


# ---------------------------------------------------------------------------
# Gaussian naive Bayes

class GaussianNBModel(Model):
    def __init__(self, spec, n_rows, means, variances, log_priors):
        super().__init__(spec, n_rows)
        self.means = np.asarray(means, dtype=np.float64)  # (2, d)
        self.variances = np.asarray(variances, dtype=np.float64)
        self.log_priors = np.asarray(log_priors, dtype=np.float64)  # (2,)

    def _proba(self, queries):
        logp = np.empty((queries.shape[0], 2))
        for c in (0, 1):
            v = self.variances[c]
            ll = -0.5 * np.sum(
                np.log(2.0 * np.pi * v) + (queries - self.means[c]) ** 2 / v, axis=1
            )
            logp[:, c] = ll + self.log_priors[c]
        m = logp.max(axis=1, keepdims=True)
        norm = m[:, 0] + np.log(np.sum(np.exp(logp - m), axis=1))
        return np.exp(logp[:, 1] - norm)

    def to_params(self):
        return {
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "log_priors": self.log_priors.tolist(),
        }

    @classmethod
    def from_params(cls, spec, n_rows, params):
        return cls(spec, n_rows, params["means"], params["variances"], params["log_priors"])


def _fit_gnb(spec: AlgorithmSpec, data: Dataset) -> GaussianNBModel:
    floor = spec.hyperparameters["variance_floor"]
    means = np.empty((2, data.n_features))
    variances = np.empty((2, data.n_features))
    log_priors = np.empty(2)
    n = len(data)
    for c in (0, 1):
        rows = data.X[data.y == c]
        means[c] = rows.mean(axis=0)
        variances[c] = np.maximum(rows.var(axis=0), floor)
        log_priors[c] = np.log(rows.shape[0] / n)
    return GaussianNBModel(spec, n, means, variances, log_priors)


# ---------------------------------------------------------------------------
# K nearest neighbors

class KNNModel(Model):
    def __init__(self, spec, n_rows, X, y):
        super().__init__(spec, n_rows)
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)

    def _proba(self, queries):
        k = min(int(self.spec.hyperparameters["n_neighbors"]), self.X.shape[0])
        out = np.empty(queries.shape[0])
        for q in range(queries.shape[0]):
            dist = np.sqrt(np.sum((self.X - queries[q]) ** 2, axis=1))
            nearest = np.argsort(dist, kind="stable")[:k]
            dn = dist[nearest]
            exact = dn == 0.0
            if np.any(exact):
                # Zero distance short-circuits distance weighting.
                out[q] = float(np.mean(self.y[nearest[exact]]))
            else:
                wts = 1.0 / dn
                out[q] = float(np.sum(wts * self.y[nearest]) / np.sum(wts))
        return out

    def to_params(self):
        return {"X": self.X.tolist(), "y": self.y.tolist()}

    @classmethod
    def from_params(cls, spec, n_rows, params):
        return cls(spec, n_rows, params["X"], params["y"])


def _fit_knn(spec: AlgorithmSpec, data: Dataset) -> KNNModel:
    return KNNModel(spec, len(data), data.X, data.y)


# ---------------------------------------------------------------------------
# Trees, forests, boosting

def _grown_tree(X, resp, w, sorted_idx, k_features, max_depth, state):
    """Run the compiled builder and trim outputs to the node count."""
    n = X.shape[0]
    cap = 2 * n + 8
    feat = np.empty(cap, dtype=np.int64)
    thr = np.empty(cap, dtype=np.float64)
    left = np.empty(cap, dtype=np.int64)
    right = np.empty(cap, dtype=np.int64)
    value = np.empty(cap, dtype=np.float64)
    n_nodes = _tree.build_tree(
        X, resp, w, sorted_idx, k_features, max_depth, feat, thr, left, right, value, state
    )
    return (
        feat[:n_nodes].copy(),
        thr[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value[:n_nodes].copy(),
    )


class DecisionTreeModel(Model):
    def __init__(self, spec, n_rows, feat, thr, left, right, value):
        super().__init__(spec, n_rows)
        self.feat = np.asarray(feat, dtype=np.int64)
        self.thr = np.asarray(thr, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)

    def _proba(self, queries):
        return _tree.tree_leaf_values(
            self.feat, self.thr, self.left, self.right, self.value, queries
        )

    def to_params(self):
        return {
            "feat": self.feat.tolist(),
            "thr": self.thr.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_params(cls, spec, n_rows, params):
        return cls(
            spec, n_rows, params["feat"], params["thr"], params["left"],
            params["right"], params["value"],
        )


def _fit_dt(spec: AlgorithmSpec, data: Dataset) -> DecisionTreeModel:
    w = _class_weights(data, spec.hyperparameters)
    sorted_idx = _tree.presort_features(data.X)
    state = _tree.rng_state(spec.seed, 0)
    resp = data.y.astype(np.float64)
    parts = _grown_tree(data.X, resp, w, sorted_idx, data.n_features, _UNLIMITED_DEPTH, state)
    return DecisionTreeModel(spec, len(data), *parts)


class RandomForestModel(Model):
    def __init__(self, spec, n_rows, feat, thr, left, right, value, offsets):
        super().__init__(spec, n_rows)
        self.feat = np.asarray(feat, dtype=np.int64)
        self.thr = np.asarray(thr, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)
        self.offsets = np.asarray(offsets, dtype=np.int64)

    def _proba(self, queries):
        return _tree.forest_vote_fraction(
            self.feat, self.thr, self.left, self.right, self.value, self.offsets, queries
        )

    def to_params(self):
        return {
            "feat": self.feat.tolist(),
            "thr": self.thr.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "offsets": self.offsets.tolist(),
        }

    @classmethod
    def from_params(cls, spec, n_rows, params):
        return cls(
            spec, n_rows, params["feat"], params["thr"], params["left"],
            params["right"], params["value"], params["offsets"],
        )


def _fit_rf(spec: AlgorithmSpec, data: Dataset) -> RandomForestModel:
    hyper = spec.hyperparameters
    n = len(data)
    cw = _class_weights(data, hyper)
    resp = data.y.astype(np.float64)
    k = min(int(hyper["max_features"]), data.n_features)

    chunks = []
    offsets = [0]
    total = 0
    for t in range(int(hyper["n_estimators"])):
        state = _tree.rng_state(spec.seed, t)
        counts = _tree.bootstrap_counts(n, state)
        # Rows outside the bootstrap support carry zero weight; drop them.
        support = counts > 0.0
        Xs = np.ascontiguousarray(data.X[support])
        w = (counts * cw)[support]
        parts = _grown_tree(
            Xs, resp[support], w, _tree.presort_features(Xs), k, _UNLIMITED_DEPTH, state
        )
        chunks.append(parts)
        total += parts[0].size
        offsets.append(total)
    feat = np.concatenate([c[0] for c in chunks])
    thr = np.concatenate([c[1] for c in chunks])
    left = np.concatenate([c[2] for c in chunks])
    right = np.concatenate([c[3] for c in chunks])
    value = np.concatenate([c[4] for c in chunks])
    return RandomForestModel(spec, n, feat, thr, left, right, value, np.array(offsets))


class GradientBoostingModel(Model):
    def __init__(self, spec, n_rows, base_score, feat, thr, left, right, value, offsets):
        super().__init__(spec, n_rows)
        self.base_score = float(base_score)
        self.feat = np.asarray(feat, dtype=np.int64)
        self.thr = np.asarray(thr, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)
        self.offsets = np.asarray(offsets, dtype=np.int64)

    def _proba(self, queries):
        lr = self.spec.hyperparameters["learning_rate"]
        score = np.full(queries.shape[0], self.base_score)
        for t in range(self.offsets.size - 1):
            lo, hi = self.offsets[t], self.offsets[t + 1]
            score += lr * _tree.tree_leaf_values(
                self.feat[lo:hi], self.thr[lo:hi], self.left[lo:hi],
                self.right[lo:hi], self.value[lo:hi], queries,
            )
        return expit(score)

    def to_params(self):
        return {
            "base_score": self.base_score,
            "feat": self.feat.tolist(),
            "thr": self.thr.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "offsets": self.offsets.tolist(),
        }

    @classmethod
    def from_params(cls, spec, n_rows, params):
        return cls(
            spec, n_rows, params["base_score"], params["feat"], params["thr"],
            params["left"], params["right"], params["value"], params["offsets"],
        )


def _fit_gbt(spec: AlgorithmSpec, data: Dataset) -> GradientBoostingModel:
    hyper = spec.hyperparameters
    n = len(data)
    y = data.y.astype(np.float64)
    ones = np.ones(n)
    base_sorted = _tree.presort_features(data.X)
    p_bar = float(y.mean())
    base_score = float(np.log(p_bar / (1.0 - p_bar)))
    score = np.full(n, base_score)
    state = _tree.rng_state(spec.seed, 0)  # depth-limited full-feature trees use no draws

    chunks = []
    offsets = [0]
    total = 0
    lr = hyper["learning_rate"]
    for _ in range(int(hyper["n_estimators"])):
        p = expit(score)
        residual = y - p
        feat, thr, left, right, value = _grown_tree(
            data.X, residual, ones, base_sorted.copy(), data.n_features,
            int(hyper["max_depth"]), state,
        )
        # Newton leaf values for logistic loss.
        leaves = _tree.tree_apply(feat, thr, left, right, data.X)
        hess = p * (1.0 - p)
        for leaf in np.unique(leaves):
            members = leaves == leaf
            value[leaf] = float(np.sum(residual[members]) / max(np.sum(hess[members]), 1e-12))
        score += lr * value[leaves]
        chunks.append((feat, thr, left, right, value))
        total += feat.size
        offsets.append(total)

    feat = np.concatenate([c[0] for c in chunks])
    thr = np.concatenate([c[1] for c in chunks])
    left = np.concatenate([c[2] for c in chunks])
    right = np.concatenate([c[3] for c in chunks])
    value = np.concatenate([c[4] for c in chunks])
    return GradientBoostingModel(
        spec, n, base_score, feat, thr, left, right, value, np.array(offsets)
    )


# ---------------------------------------------------------------------------
# Support vector machines

class SVMModel(Model):
    def __init__(self, spec, n_rows, support_X, dual_coef, bias, gamma, platt_a, platt_b):
        super().__init__(spec, n_rows)
        self.support_X = np.asarray(support_X, dtype=np.float64)
        self.dual_coef = np.asarray(dual_coef, dtype=np.float64)  # alpha_i * y_i
        self.bias = float(bias)
        self.gamma = None if gamma is None else float(gamma)
        self.platt_a = float(platt_a)
        self.platt_b = float(platt_b)

    def _kernel(self, A, B):
        if self.gamma is None:
            return A @ B.T
        sq = (
            np.sum(A**2, axis=1)[:, None]
            + np.sum(B**2, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        return np.exp(-self.gamma * np.maximum(sq, 0.0))

    def decision_values(self, queries) -> np.ndarray:
        queries, single = _query_matrix(queries)
        d = self._kernel(queries, self.support_X) @ self.dual_coef + self.bias
        return d[0] if single else d

    def _proba(self, queries):
        d = self._kernel(queries, self.support_X) @ self.dual_coef + self.bias
        return sigmoid_probability(d, self.platt_a, self.platt_b)

    def to_params(self):
        return {
            "support_X": self.support_X.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "bias": self.bias,
            "gamma": self.gamma,
            "platt_a": self.platt_a,
            "platt_b": self.platt_b,
        }

    @classmethod
    def from_params(cls, spec, n_rows, params):
        return cls(
            spec, n_rows, params["support_X"], params["dual_coef"], params["bias"],
            params["gamma"], params["platt_a"], params["platt_b"],
        )


def _fit_svm(spec: AlgorithmSpec, data: Dataset) -> SVMModel:
    hyper = spec.hyperparameters
    X = data.X
    y_pm = (2.0 * data.y - 1.0).astype(np.float64)
    cw = _class_weights(data, hyper)
    C = hyper["c"] * cw

    if spec.kind == "SVM_RBF":
        variance = float(X.var())
        gamma = 1.0 / (data.n_features * variance) if variance > 0 else 1.0
        sq = (
            np.sum(X**2, axis=1)[:, None]
            + np.sum(X**2, axis=1)[None, :]
            - 2.0 * (X @ X.T)
        )
        K = np.exp(-gamma * np.maximum(sq, 0.0))
    else:
        gamma = None
        K = X @ X.T

    alpha, bias, _ = smo_solve(K, y_pm, C, hyper["tol"], int(hyper["max_iter"]))
    decisions = K @ (alpha * y_pm) + bias
    platt_a, platt_b = fit_sigmoid(decisions, data.y)

    keep = alpha > 1e-12
    if not np.any(keep):
        keep = np.ones_like(alpha, dtype=bool)
    return SVMModel(
        spec, len(data), X[keep], (alpha * y_pm)[keep], bias, gamma, platt_a, platt_b
    )


# ---------------------------------------------------------------------------
# Public surface

_FITTERS = {
    "LR": _fit_lr,
    "DT": _fit_dt,
    "RF": _fit_rf,
    "GBT": _fit_gbt,
    "KNN": _fit_knn,
    "GNB": _fit_gnb,
    "SVM_RBF": _fit_svm,
    "SVM_LINEAR": _fit_svm,
}

_MODEL_CLASSES = {
    "LR": LogisticModel,
    "DT": DecisionTreeModel,
    "RF": RandomForestModel,
    "GBT": GradientBoostingModel,
    "KNN": KNNModel,
    "GNB": GaussianNBModel,
    "SVM_RBF": SVMModel,
    "SVM_LINEAR": SVMModel,
}


def fit(spec: AlgorithmSpec, data: Dataset) -> Model:
    """Train one classifier; deterministic given (spec, data)."""
    data.validate_for_training()
    return _FITTERS[spec.kind](spec, data)


def predict_proba(model: Model, x) -> float:
    """Probability of label 1 for one feature vector (or rows of a matrix)."""
    return model.predict_proba(x)
