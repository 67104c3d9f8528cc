# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: SMO dual solver and DBSCAN labelling."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

cdef double TAU = 1e-12


def smo_solve(K, y, double C, double tol, long max_iter):
    cdef double[:, ::1] Kv = np.ascontiguousarray(K, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = yv.shape[0]
    alpha_arr = np.zeros(n)
    G_arr = -np.ones(n)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] G = G_arr
    cdef Py_ssize_t i, j, t
    cdef long it = 0
    cdef double gap = 0.0, g_max, g_min, v, b, a, obj, best_obj
    cdef double quad, delta, diff, total, ai, aj, old_i, old_j, d_i, d_j
    cdef double rho, sum_free, ub, lb
    cdef long nr_free
    cdef bint up, low

    with nogil:
        while True:
            g_max = -INFINITY
            g_min = INFINITY
            i = -1
            for t in range(n):
                v = -yv[t] * G[t]
                if yv[t] > 0:
                    up = alpha[t] < C
                    low = alpha[t] > 0
                else:
                    up = alpha[t] > 0
                    low = alpha[t] < C
                if up and v > g_max:
                    g_max = v
                    i = t
                if low and v < g_min:
                    g_min = v
            if i < 0 or g_min == INFINITY:
                gap = 0.0
                break
            gap = g_max - g_min
            if gap < tol or it >= max_iter:
                break
            j = -1
            best_obj = INFINITY
            for t in range(n):
                if yv[t] > 0:
                    low = alpha[t] > 0
                else:
                    low = alpha[t] < C
                if not low:
                    continue
                v = -yv[t] * G[t]
                if v >= g_max:
                    continue
                b = g_max - v
                a = Kv[i, i] + Kv[t, t] - 2.0 * Kv[i, t]
                if a <= 0:
                    a = TAU
                obj = -(b * b) / a
                if obj < best_obj:
                    best_obj = obj
                    j = t
            if j < 0:
                break

            old_i = alpha[i]
            old_j = alpha[j]
            quad = Kv[i, i] + Kv[j, j] - 2.0 * Kv[i, j]
            if quad <= 0:
                quad = TAU
            ai = old_i
            aj = old_j
            if yv[i] != yv[j]:
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
            alpha[i] = ai
            alpha[j] = aj
            d_i = (ai - old_i) * yv[i]
            d_j = (aj - old_j) * yv[j]
            for t in range(n):
                G[t] += yv[t] * (d_i * Kv[i, t] + d_j * Kv[j, t])
            it += 1

        sum_free = 0.0
        nr_free = 0
        ub = INFINITY
        lb = -INFINITY
        for t in range(n):
            v = yv[t] * G[t]
            if alpha[t] >= C:
                if yv[t] < 0:
                    if v < ub:
                        ub = v
                else:
                    if v > lb:
                        lb = v
            elif alpha[t] <= 0:
                if yv[t] > 0:
                    if v < ub:
                        ub = v
                else:
                    if v > lb:
                        lb = v
            else:
                nr_free += 1
                sum_free += v
        if nr_free > 0:
            rho = sum_free / nr_free
        else:
            rho = (ub + lb) / 2.0
    return alpha_arr, rho, it, gap


def dbscan(points, double eps, long min_pts):
    cdef double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    labels_arr = np.full(n, -2, dtype=np.int64)
    if n == 0:
        return labels_arr
    cdef cnp.int64_t[::1] labels = labels_arr
    core_arr = np.zeros(n, dtype=np.uint8)
    queue_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.uint8_t[::1] core = core_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef double eps2 = eps * eps, dx, dy
    cdef Py_ssize_t s, q, head, tail, pp
    cdef long count
    cdef cnp.int64_t cluster = 0

    with nogil:
        for s in range(n):
            count = 0
            for q in range(n):
                dx = p[s, 0] - p[q, 0]
                dy = p[s, 1] - p[q, 1]
                if dx * dx + dy * dy <= eps2:
                    count += 1
            core[s] = count >= min_pts
        for s in range(n):
            if labels[s] != -2 or not core[s]:
                continue
            labels[s] = cluster
            head = 0
            tail = 0
            queue[tail] = s
            tail += 1
            while head < tail:
                pp = queue[head]
                head += 1
                if not core[pp]:
                    continue
                for q in range(n):
                    if labels[q] != -2:
                        continue
                    dx = p[pp, 0] - p[q, 0]
                    dy = p[pp, 1] - p[q, 1]
                    if dx * dx + dy * dy <= eps2:
                        labels[q] = cluster
                        queue[tail] = q
                        tail += 1
            cluster += 1
        for s in range(n):
            if labels[s] == -2:
                labels[s] = -1
    return labels_arr
