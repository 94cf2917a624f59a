"""Compiled CART core shared by the tree, forest, and boosting learners.

Trees minimize weighted squared error of the response. For 0/1 labels with
sample weights this is identical to weighted Gini splitting, so one kernel
serves classification trees (response = label) and boosting stages
(response = residual). Randomness is a counter-based generator keyed by
(seed, tree_index), so results never depend on row order or scheduling.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_MIX1 = np.uint64(0x9E3779B97F4A7C15)
_MIX2 = np.uint64(0xBF58476D1CE4E5B9)
_MIX3 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _next_u64(state):
    state[0] = state[0] + _MIX1
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * _MIX2
    z = (z ^ (z >> np.uint64(27))) * _MIX3
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def rng_state(seed, tree_index):
    state = np.empty(1, dtype=np.uint64)
    state[0] = (np.uint64(seed) * _MIX2) ^ ((np.uint64(tree_index) + _MIX1) * _MIX3)
    for _ in range(3):
        _next_u64(state)
    return state


@njit(cache=True)
def bootstrap_counts(n, state):
    """Multiplicity of each row in a size-n bootstrap draw."""
    counts = np.zeros(n, dtype=np.float64)
    un = np.uint64(n)
    for _ in range(n):
        counts[int(_next_u64(state) % un)] += 1.0
    return counts


@njit(cache=True)
def presort_features(X):
    n, d = X.shape
    out = np.empty((d, n), dtype=np.int64)
    for f in range(d):
        out[f] = np.argsort(X[:, f], kind="mergesort")
    return out


@njit(cache=True)
def _segment_stats(X, resp, w, rows, lo, hi):
    tw = 0.0
    ts = 0.0
    tss = 0.0
    for i in range(lo, hi):
        r = rows[i]
        tw += w[r]
        ts += w[r] * resp[r]
        tss += w[r] * resp[r] * resp[r]
    return tw, ts, tss


@njit(cache=True)
def build_tree(
    X,
    resp,
    w,
    sorted_idx,
    k_features,
    max_depth,
    feat_out,
    thr_out,
    left_out,
    right_out,
    value_out,
    state,
):
    """Grow one tree; returns the node count.

    ``sorted_idx`` is a (d, n) per-feature presorted index table owned by the
    caller; it is partitioned in place. Output arrays must hold 2n + 1 nodes.
    Child links are local node ids within this tree.
    """
    n = sorted_idx.shape[1]
    d = X.shape[1]

    cap = 2 * n + 8
    st_node = np.empty(cap, dtype=np.int64)
    st_lo = np.empty(cap, dtype=np.int64)
    st_hi = np.empty(cap, dtype=np.int64)
    st_depth = np.empty(cap, dtype=np.int64)
    st_w = np.empty(cap, dtype=np.float64)
    st_s = np.empty(cap, dtype=np.float64)
    st_ss = np.empty(cap, dtype=np.float64)

    tw, ts, tss = _segment_stats(X, resp, w, sorted_idx[0], 0, n)
    st_node[0], st_lo[0], st_hi[0], st_depth[0] = 0, 0, n, 0
    st_w[0], st_s[0], st_ss[0] = tw, ts, tss
    sp = 1
    n_nodes = 1

    feat_buf = np.empty(d, dtype=np.int64)
    tmp_left = np.empty(n, dtype=np.int64)
    tmp_right = np.empty(n, dtype=np.int64)

    while sp > 0:
        sp -= 1
        node = st_node[sp]
        lo, hi = st_lo[sp], st_hi[sp]
        depth = st_depth[sp]
        wn, sn, ssn = st_w[sp], st_s[sp], st_ss[sp]

        value_out[node] = sn / wn if wn > 0.0 else 0.0
        feat_out[node] = -1
        left_out[node] = -1
        right_out[node] = -1

        if depth >= max_depth or hi - lo < 2 or wn <= 1e-12:
            continue
        variance_sum = ssn - sn * sn / wn
        if variance_sum <= 1e-12 * max(wn, 1.0):
            continue

        if k_features >= d:
            kf = d
            for f in range(d):
                feat_buf[f] = f
        else:
            kf = k_features
            for f in range(d):
                feat_buf[f] = f
            for a in range(kf):
                b = a + int(_next_u64(state) % np.uint64(d - a))
                feat_buf[a], feat_buf[b] = feat_buf[b], feat_buf[a]
            for a in range(1, kf):  # ascending scan order for determinism
                key = feat_buf[a]
                b = a - 1
                while b >= 0 and feat_buf[b] > key:
                    feat_buf[b + 1] = feat_buf[b]
                    b -= 1
                feat_buf[b + 1] = key

        baseline = sn * sn / wn
        best_gain = baseline
        best_f = -1
        best_thr = 0.0
        for fi in range(kf):
            f = feat_buf[fi]
            rows = sorted_idx[f]
            cw = 0.0
            cs = 0.0
            for i in range(lo, hi - 1):
                r = rows[i]
                cw += w[r]
                cs += w[r] * resp[r]
                xv = X[r, f]
                xn = X[rows[i + 1], f]
                if xn > xv:
                    rw = wn - cw
                    if cw > 1e-12 and rw > 1e-12:
                        gain = cs * cs / cw + (sn - cs) * (sn - cs) / rw
                        if gain > best_gain:
                            best_gain = gain
                            best_f = f
                            best_thr = 0.5 * (xv + xn)
        if best_f < 0:
            continue

        n_left = 0
        for fi in range(d):
            rows = sorted_idx[fi]
            cl = 0
            cr = 0
            for i in range(lo, hi):
                r = rows[i]
                if X[r, best_f] <= best_thr:
                    tmp_left[cl] = r
                    cl += 1
                else:
                    tmp_right[cr] = r
                    cr += 1
            for i in range(cl):
                rows[lo + i] = tmp_left[i]
            for i in range(cr):
                rows[lo + cl + i] = tmp_right[i]
            n_left = cl

        lw, ls, lss = _segment_stats(X, resp, w, sorted_idx[0], lo, lo + n_left)
        rw_, rs_, rss_ = _segment_stats(X, resp, w, sorted_idx[0], lo + n_left, hi)

        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        feat_out[node] = best_f
        thr_out[node] = best_thr
        left_out[node] = left_id
        right_out[node] = right_id

        st_node[sp], st_lo[sp], st_hi[sp], st_depth[sp] = right_id, lo + n_left, hi, depth + 1
        st_w[sp], st_s[sp], st_ss[sp] = rw_, rs_, rss_
        sp += 1
        st_node[sp], st_lo[sp], st_hi[sp], st_depth[sp] = left_id, lo, lo + n_left, depth + 1
        st_w[sp], st_s[sp], st_ss[sp] = lw, ls, lss
        sp += 1

    return n_nodes


@njit(cache=True)
def tree_leaf_values(feat, thr, left, right, value, Xq):
    """Leaf value per query row for a single tree (local child links)."""
    nq = Xq.shape[0]
    out = np.empty(nq, dtype=np.float64)
    for q in range(nq):
        node = 0
        while feat[node] >= 0:
            if Xq[q, feat[node]] <= thr[node]:
                node = left[node]
            else:
                node = right[node]
        out[q] = value[node]
    return out


@njit(cache=True)
def tree_apply(feat, thr, left, right, Xq):
    """Leaf node id per query row for a single tree."""
    nq = Xq.shape[0]
    out = np.empty(nq, dtype=np.int64)
    for q in range(nq):
        node = 0
        while feat[node] >= 0:
            if Xq[q, feat[node]] <= thr[node]:
                node = left[node]
            else:
                node = right[node]
        out[q] = node
    return out


@njit(cache=True)
def forest_vote_fraction(feat, thr, left, right, value, offsets, Xq):
    """Fraction of trees whose leaf majority votes class 1 (ties count half)."""
    nq = Xq.shape[0]
    n_trees = offsets.size - 1
    out = np.empty(nq, dtype=np.float64)
    for q in range(nq):
        votes = 0.0
        for t in range(n_trees):
            base = offsets[t]
            node = base
            while feat[node] >= 0:
                if Xq[q, feat[node]] <= thr[node]:
                    node = base + left[node]
                else:
                    node = base + right[node]
            v = value[node]
            if v > 0.5:
                votes += 1.0
            elif v == 0.5:
                votes += 0.5
        out[q] = votes / n_trees
    return out
