"""Pure-Python/numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` step for step and are used when the compiled
extension is unavailable (or ``ISAKIT_PURE_PYTHON=1`` is set).
"""

from __future__ import annotations

import numpy as np

TAU = 1e-12


def smo_solve(K, y, C, tol, max_iter):
    """Solve the soft-margin SVM dual with second-order working-set SMO.

    Parameters
    ----------
    K : (n, n) float64 array
        Symmetric kernel matrix.
    y : (n,) float64 array of +1/-1 labels.
    C : float
        Box constraint.
    tol : float
        Stop when the maximal KKT violation ``m(alpha) - M(alpha)`` is below it.
    max_iter : int
        Cap on pair updates.

    Returns
    -------
    alpha, rho, n_iter, gap
        Dual variables, offset (decision = sum(alpha*y*K) - rho), number of
        pair updates performed and the final violation gap.
    """
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = y.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)
    diag = K.diagonal().copy()
    pos = y > 0
    neg = ~pos
    it = 0
    gap = 0.0
    while True:
        yG = -y * G
        up = (pos & (alpha < C)) | (neg & (alpha > 0))
        low = (pos & (alpha > 0)) | (neg & (alpha < C))
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.argmax(np.where(up, yG, -np.inf)))
        g_max = yG[i]
        g_min = np.min(yG[low])
        gap = float(g_max - g_min)
        if gap < tol or it >= max_iter:
            break
        cand = low & (yG < g_max)
        b = g_max - yG
        a = diag[i] + diag - 2.0 * K[i]
        a = np.where(a > 0, a, TAU)
        obj = np.where(cand, -(b * b) / a, np.inf)
        j = int(np.argmin(obj))
        if not cand[j]:
            break

        old_i, old_j = alpha[i], alpha[j]
        quad = diag[i] + diag[j] - 2.0 * K[i, j]
        if quad <= 0:
            quad = TAU
        ai, aj = old_i, old_j
        if y[i] != y[j]:
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0:
                if aj < 0:
                    aj = 0.0
                    ai = diff
            else:
                if ai < 0:
                    ai = 0.0
                    aj = -diff
            if diff > 0:
                if ai > C:
                    ai = C
                    aj = C - diff
            else:
                if aj > C:
                    aj = C
                    ai = C + diff
        else:
            delta = (G[i] - G[j]) / quad
            total = ai + aj
            ai -= delta
            aj += delta
            if total > C:
                if ai > C:
                    ai = C
                    aj = total - C
            else:
                if aj < 0:
                    aj = 0.0
                    ai = total
            if total > C:
                if aj > C:
                    aj = C
                    ai = total - C
            else:
                if ai < 0:
                    ai = 0.0
                    aj = total
        alpha[i], alpha[j] = ai, aj
        d_i = (ai - old_i) * y[i]
        d_j = (aj - old_j) * y[j]
        G += y * (d_i * K[i] + d_j * K[j])
        it += 1

    yG = y * G
    at_upper = alpha >= C
    at_lower = alpha <= 0
    free = ~at_upper & ~at_lower
    if free.any():
        rho = float(np.sum(yG[free]) / np.count_nonzero(free))
    else:
        ub_mask = (at_upper & neg) | (at_lower & pos)
        lb_mask = (at_upper & pos) | (at_lower & neg)
        ub = np.min(yG[ub_mask]) if ub_mask.any() else np.inf
        lb = np.max(yG[lb_mask]) if lb_mask.any() else -np.inf
        rho = float((ub + lb) / 2.0)
    return alpha, rho, it, gap


def dbscan(points, eps, min_pts):
    """DBSCAN labels (-1 noise, clusters numbered in discovery order)."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n = pts.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    dx = pts[:, 0][:, None] - pts[:, 0][None, :]
    dy = pts[:, 1][:, None] - pts[:, 1][None, :]
    adj = dx * dx + dy * dy <= eps * eps
    core = adj.sum(axis=1) >= min_pts
    unassigned = -2
    labels = np.full(n, unassigned, dtype=np.int64)
    cluster = 0
    for start in range(n):
        if labels[start] != unassigned or not core[start]:
            continue
        labels[start] = cluster
        queue = [start]
        head = 0
        while head < len(queue):
            p = queue[head]
            head += 1
            if not core[p]:
                continue
            for q in np.flatnonzero(adj[p]):
                if labels[q] == unassigned:
                    labels[q] = cluster
                    queue.append(int(q))
        cluster += 1
    labels[labels == unassigned] = -1
    return labels
