"""Compiled SMO solver for soft-margin SVMs with per-sample box constraints."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def smo_solve(K, y, C, tol, max_iter):
    """Solve the SVM dual by sequential minimal optimization.

    K is the full kernel matrix, y in {-1, +1}, C the per-sample upper
    bounds. Working pairs are chosen by maximal KKT violation, so the run
    is deterministic. Returns (alpha, b, iterations).
    """
    n = y.size
    alpha = np.zeros(n, dtype=np.float64)
    # F_i = sum_j alpha_j y_j K_ij - y_i  (decision minus bias minus target)
    F = -y.astype(np.float64)

    it = 0
    b_up = -1.0
    b_low = 1.0
    while it < max_iter:
        b_up = np.inf
        b_low = -np.inf
        i_up = -1
        i_low = -1
        for k in range(n):
            up = (y[k] > 0.0 and alpha[k] < C[k]) or (y[k] < 0.0 and alpha[k] > 0.0)
            low = (y[k] > 0.0 and alpha[k] > 0.0) or (y[k] < 0.0 and alpha[k] < C[k])
            if up and F[k] < b_up:
                b_up = F[k]
                i_up = k
            if low and F[k] > b_low:
                b_low = F[k]
                i_low = k
        if i_up < 0 or i_low < 0 or b_low - b_up <= 2.0 * tol:
            break

        i = i_up
        j = i_low
        yi, yj = y[i], y[j]
        ai_old, aj_old = alpha[i], alpha[j]
        if yi != yj:
            L = max(0.0, aj_old - ai_old)
            H = min(C[j], C[i] + aj_old - ai_old)
        else:
            L = max(0.0, ai_old + aj_old - C[i])
            H = min(C[j], ai_old + aj_old)
        if H - L < 1e-12:
            # Degenerate box; no movement possible for this pair.
            break

        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta > 1e-12:
            aj_new = aj_old + yj * (F[i] - F[j]) / eta
            if aj_new < L:
                aj_new = L
            elif aj_new > H:
                aj_new = H
        else:
            # Flat direction: slide to whichever bound the gradient favors.
            if yj * (F[i] - F[j]) < 0.0:
                aj_new = L
            else:
                aj_new = H
        if abs(aj_new - aj_old) < 1e-14:
            break

        ai_new = ai_old + yi * yj * (aj_old - aj_new)
        d_i = (ai_new - ai_old) * yi
        d_j = (aj_new - aj_old) * yj
        for k in range(n):
            F[k] += d_i * K[i, k] + d_j * K[j, k]
        alpha[i] = ai_new
        alpha[j] = aj_new
        it += 1

    b = -(b_up + b_low) / 2.0
    return alpha, b, it
