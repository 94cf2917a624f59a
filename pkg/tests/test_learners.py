"""Classifier contracts: hand oracles, determinism, invariances, persistence."""

import numpy as np
import pytest
from scipy.optimize import minimize
from scipy.special import expit

from voicetriage.learners import (
    ALGORITHM_KINDS,
    AlgorithmSpec,
    Dataset,
    EmptyData,
    NonFiniteInput,
    SingleClassData,
    fit,
    load_model,
    make_spec,
    model_from_document,
    model_to_document,
    save_model,
)

DIM = 7


def dataset(X, y, sids=None, ts=None):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if sids is None:
        sids = np.array([f"s{i}" for i in range(len(y))], dtype=object)
    return Dataset(X, y, sids, ts)


def toy_blobs(n_per=20, gap=4.0, seed=0, std=1.0):
    rng = np.random.default_rng(seed)
    X0 = rng.normal(0.0, std, (n_per, DIM))
    X1 = rng.normal(0.0, std, (n_per, DIM))
    X1[:, 0] += gap
    X = np.vstack([X0, X1])
    y = np.array([0] * n_per + [1] * n_per)
    return dataset(X, y)


# ---------------------------------------------------------------------------
# Hand-computed oracles

def test_gnb_hand_computed_two_cluster():
    X = np.vstack([np.zeros((2, DIM)), np.ones((2, DIM))])
    X += np.array([[0.01], [-0.01], [0.01], [-0.01]])  # tiny spread, nonzero variance
    data = dataset(X, [0, 0, 1, 1])
    model = fit(make_spec("GNB"), data)
    assert np.allclose(model.means[0], 0.0, atol=0.02)
    assert np.allclose(model.means[1], 1.0, atol=0.02)
    assert model.predict_proba(np.zeros(DIM)) < 0.01


def test_gnb_symmetric_midpoint_is_half():
    X = np.vstack([np.zeros((3, DIM)), np.ones((3, DIM))])
    X[[0, 3], 0] += 0.1
    X[[1, 4], 0] -= 0.1
    data = dataset(X, [0, 0, 0, 1, 1, 1])
    model = fit(make_spec("GNB"), data)
    midpoint = np.full(DIM, 0.5)
    assert model.predict_proba(midpoint) == pytest.approx(0.5, abs=1e-9)


def test_dt_pure_split_single_node():
    rng = np.random.default_rng(1)
    X = rng.normal(0, 1, (30, DIM))
    y = (X[:, 1] > 0.0).astype(int)
    model = fit(make_spec("DT"), dataset(X, y))
    assert model.feat.size == 3  # root plus two leaves
    assert model.feat[0] == 1
    preds = model.predict_proba(X)
    assert np.all((preds > 0.5) == y)


def test_lr_separable_confident_deep_in_halfspace():
    data = toy_blobs(gap=6.0)
    model = fit(make_spec("LR"), data)
    deep_one = np.zeros(DIM)
    deep_one[0] = 10.0
    assert model.predict_proba(deep_one) > 0.9
    assert model.predict_proba(np.zeros(DIM) - 3.0) < 0.5


def test_lr_matches_brute_force_optimizer():
    # non-separable data so the optimum is finite and unique
    rng = np.random.default_rng(5)
    X = rng.normal(0, 1, (60, DIM))
    logits = 1.5 * X[:, 0] - 0.5
    y = (rng.uniform(size=60) < expit(logits)).astype(int)
    data = dataset(X, y)
    model = fit(make_spec("LR", max_iter=20000, tol=1e-14), data)

    cw = data.balanced_class_weights()
    s = np.array([cw[int(c)] for c in data.y])
    s = s / s.sum()
    Z = np.hstack([data.X, np.ones((len(data), 1))])
    y_pm = 2.0 * data.y - 1.0

    def loss(w):
        return float(np.sum(s * np.logaddexp(0.0, -y_pm * (Z @ w))))

    ref = minimize(loss, np.zeros(DIM + 1), method="BFGS", tol=1e-12)
    probe = rng.normal(0, 1, (20, DIM))
    ours = model.predict_proba(probe)
    theirs = expit(probe @ ref.x[:-1] + ref.x[-1])
    assert np.allclose(ours, theirs, atol=2e-3)


def test_knn_exact_match_short_circuit():
    data = toy_blobs(n_per=10)
    model = fit(make_spec("KNN"), data)
    row = data.X[data.y == 1][0]
    assert model.predict_proba(row) == 1.0
    row0 = data.X[data.y == 0][0]
    assert model.predict_proba(row0) == 0.0


def test_knn_distance_weighting():
    X = np.zeros((4, DIM))
    X[0, 0], X[1, 0], X[2, 0], X[3, 0] = 0.0, 1.0, 2.0, 3.0
    data = dataset(X, [0, 0, 1, 1])
    model = fit(make_spec("KNN", n_neighbors=4), data)
    q = np.zeros(DIM)
    q[0] = 1.6  # closer to the class-1 side
    p = model.predict_proba(q)
    w = 1.0 / np.abs(np.array([0.0, 1.0, 2.0, 3.0]) - 1.6)
    expected = (w[2] + w[3]) / w.sum()
    assert p == pytest.approx(expected, rel=1e-9)


# ---------------------------------------------------------------------------
# Shared behavior

@pytest.mark.parametrize("kind", ALGORITHM_KINDS)
def test_probabilities_in_unit_interval(kind):
    data = toy_blobs(gap=2.0, seed=3)
    hyper = {"n_estimators": 25} if kind in ("RF", "GBT") else {}
    model = fit(make_spec(kind, **hyper), data)
    rng = np.random.default_rng(0)
    probes = rng.normal(0, 3, (50, DIM))
    p = model.predict_proba(probes)
    assert np.all((p >= 0.0) & (p <= 1.0))


@pytest.mark.parametrize("kind", ALGORITHM_KINDS)
def test_seeded_determinism(kind):
    data = toy_blobs(gap=1.0, seed=4)
    hyper = {"n_estimators": 25} if kind in ("RF", "GBT") else {}
    rng = np.random.default_rng(1)
    probes = rng.normal(0, 2, (20, DIM))
    a = fit(make_spec(kind, seed=9, **hyper), data).predict_proba(probes)
    b = fit(make_spec(kind, seed=9, **hyper), data).predict_proba(probes)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("kind", ALGORITHM_KINDS)
def test_row_order_invariance(kind):
    data = toy_blobs(gap=1.5, seed=6)
    hyper = {"n_estimators": 25} if kind in ("RF", "GBT") else {}
    rng = np.random.default_rng(2)
    perm = rng.permutation(len(data))
    shuffled = dataset(data.X[perm], data.y[perm],
                       sids=data.subject_ids[perm], ts=data.timestamps[perm])
    probes = rng.normal(0, 2, (20, DIM))
    a = fit(make_spec(kind, seed=5, **hyper), data).predict_proba(probes)
    b = fit(make_spec(kind, seed=5, **hyper), shuffled).predict_proba(probes)
    assert np.array_equal(a, b)


def test_rf_same_seed_identical_different_seed_not():
    data = toy_blobs(gap=0.5, seed=7)
    probes = np.random.default_rng(3).normal(0, 2, (30, DIM))
    a = fit(make_spec("RF", seed=1, n_estimators=30), data).predict_proba(probes)
    b = fit(make_spec("RF", seed=1, n_estimators=30), data).predict_proba(probes)
    c = fit(make_spec("RF", seed=2, n_estimators=30), data).predict_proba(probes)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_balanced_weighting_equals_duplication():
    # minority duplicated 3x matches balanced weighting for DT exactly,
    # and moves LR toward the balanced fit
    rng = np.random.default_rng(11)
    X0 = rng.normal(0, 1, (9, DIM))
    X1 = rng.normal(1.2, 1, (3, DIM))
    X = np.vstack([X0, X1])
    y = np.array([0] * 9 + [1] * 3)
    base = dataset(X, y)
    dup = dataset(
        np.vstack([X0, np.repeat(X1, 3, axis=0)]), np.array([0] * 9 + [1] * 9)
    )
    probes = rng.normal(0.5, 1, (25, DIM))

    dt_balanced = fit(make_spec("DT"), base).predict_proba(probes)
    dt_dup = fit(make_spec("DT", class_weight=None), dup).predict_proba(probes)
    assert np.allclose(dt_balanced, dt_dup)

    lr_balanced = fit(make_spec("LR"), base).predict_proba(probes)
    lr_plain = fit(make_spec("LR", class_weight=None), base).predict_proba(probes)
    lr_dup = fit(make_spec("LR", class_weight=None), dup).predict_proba(probes)
    moved = np.abs(lr_dup - lr_balanced) <= np.abs(lr_plain - lr_balanced) + 1e-9
    assert np.mean(moved) > 0.9


def test_svm_separates_and_calibrates():
    data = toy_blobs(gap=5.0, seed=8)
    for kind in ("SVM_RBF", "SVM_LINEAR"):
        model = fit(make_spec(kind), data)
        p = model.predict_proba(data.X)
        assert np.mean((p > 0.5) == data.y) >= 0.95
        far_one = np.zeros(DIM)
        far_one[0] = 5.0
        far_zero = np.zeros(DIM)
        far_zero[0] = -1.0
        assert model.predict_proba(far_one) > model.predict_proba(far_zero)


def test_gbt_fits_separable_data():
    data = toy_blobs(gap=4.0, seed=9)
    model = fit(make_spec("GBT", n_estimators=50), data)
    p = model.predict_proba(data.X)
    assert np.mean((p > 0.5) == data.y) == 1.0


# ---------------------------------------------------------------------------
# Errors

def test_single_class_and_empty_rejected():
    rng = np.random.default_rng(0)
    X = rng.normal(0, 1, (5, DIM))
    with pytest.raises(SingleClassData):
        fit(make_spec("GNB"), dataset(X, [1, 1, 1, 1, 1]))
    with pytest.raises(EmptyData):
        fit(make_spec("GNB"), dataset(np.zeros((0, DIM)), []))


def test_non_finite_query_rejected():
    model = fit(make_spec("GNB"), toy_blobs(n_per=5))
    bad = np.zeros(DIM)
    bad[3] = np.nan
    with pytest.raises(NonFiniteInput):
        model.predict_proba(bad)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        AlgorithmSpec(kind="MLP")
    with pytest.raises(ValueError):
        make_spec("RF", depth=3)


# ---------------------------------------------------------------------------
# Persistence

@pytest.mark.parametrize("kind", ALGORITHM_KINDS)
def test_save_load_round_trips_bit_identical(kind, tmp_path):
    data = toy_blobs(gap=1.0, seed=10)
    hyper = {"n_estimators": 15} if kind in ("RF", "GBT") else {}
    model = fit(make_spec(kind, seed=3, **hyper), data)
    path = tmp_path / f"{kind}.json"
    save_model(model, path)
    loaded = load_model(path)
    probes = np.random.default_rng(4).normal(0, 2, (40, DIM))
    assert np.array_equal(model.predict_proba(probes), loaded.predict_proba(probes))


def test_document_version_checked():
    model = fit(make_spec("GNB"), toy_blobs(n_per=5))
    doc = model_to_document(model)
    doc["format_version"] = 99
    with pytest.raises(ValueError):
        model_from_document(doc)
