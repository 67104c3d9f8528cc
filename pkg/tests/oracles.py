"""Independent reference implementations used as test oracles.

These are deliberately naive so they share no code path with the package.
"""

from __future__ import annotations

import numpy as np


def brute_dbscan(points, eps, min_pts):
    """O(n^2) DBSCAN via a dense adjacency matrix and union-find over cores.

    Clusters are numbered by their lowest-index core point; a border point
    joins the lowest-numbered cluster among its core neighbours.
    """
    p = np.asarray(points, dtype=float)
    n = len(p)
    d2 = ((p[:, None, :] - p[None, :, :]) ** 2).sum(axis=2)
    adj = d2 <= eps * eps
    core = adj.sum(axis=1) >= min_pts
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        if not core[i]:
            continue
        for j in range(i + 1, n):
            if core[j] and adj[i, j]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    ids: dict[int, int] = {}
    labels = np.full(n, -1)
    for i in range(n):
        if core[i]:
            root = find(i)
            if root not in ids:
                ids[root] = len(ids)
            labels[i] = ids[root]
    for i in range(n):
        if not core[i]:
            nb = [labels[j] for j in range(n) if core[j] and adj[i, j]]
            if nb:
                labels[i] = min(nb)
    return labels


def same_partition(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape or not np.array_equal(a == -1, b == -1):
        return False
    fwd, back = {}, {}
    for x, y in zip(a, b):
        if x == -1:
            continue
        if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
            return False
    return True


def central_differences(fn, v, h=1e-6):
    v = np.asarray(v, dtype=float)
    g = np.empty_like(v)
    for k in range(len(v)):
        e = np.zeros_like(v)
        e[k] = h
        g[k] = (fn(v + e) - fn(v - e)) / (2 * h)
    return g


def ray_cast(ring, point) -> bool:
    """Classic crossing-number test; undefined exactly on the boundary."""
    x, y = point
    inside = False
    n = len(ring)
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def shoelace(ring) -> float:
    r = np.asarray(ring, dtype=float)
    x, y = r[:, 0], r[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def clip_convex(subject, clip):
    """Sutherland-Hodgman: subject polygon clipped by a CCW convex polygon."""
    out = [tuple(p) for p in subject]
    m = len(clip)
    for i in range(m):
        a, b = np.asarray(clip[i]), np.asarray(clip[(i + 1) % m])
        inp, out = out, []
        if not inp:
            break

        def side(p):
            return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])

        for j in range(len(inp)):
            cur, prev = np.asarray(inp[j]), np.asarray(inp[j - 1])
            sc, sp = side(cur), side(prev)
            if sc >= 0:
                if sp < 0:
                    t = sp / (sp - sc)
                    out.append(tuple(prev + t * (cur - prev)))
                out.append(tuple(cur))
            elif sp >= 0:
                t = sp / (sp - sc)
                out.append(tuple(prev + t * (cur - prev)))
    return out


def boxcox_lambda_scan(x, lo=-5.0, hi=5.0):
    """Maximise scipy's Box-Cox log-likelihood by a coarse-then-fine grid."""
    from scipy import stats

    grid = np.linspace(lo, hi, 2001)
    llf = np.array([stats.boxcox_llf(l, x) for l in grid])
    k = int(np.nanargmax(llf))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    fine = np.linspace(a, b, 2001)
    llf = np.array([stats.boxcox_llf(l, x) for l in fine])
    return float(fine[int(np.nanargmax(llf))])


def halton(n, base):
    out = np.empty(n)
    for i in range(n):
        f, r, k = 1.0, 0.0, i + 1
        while k:
            f /= base
            r += f * (k % base)
            k //= base
        out[i] = r
    return out


def boxcox_llf_grid(x, lams):
    """Profile log-likelihood of Box-Cox at every lambda in ``lams`` at once."""
    x = np.asarray(x, dtype=float)
    lams = np.asarray(lams, dtype=float)
    logx = np.log(x)
    safe = np.where(lams == 0, 1.0, lams)
    t = np.where(lams[:, None] == 0, logx[None, :],
                 np.expm1(safe[:, None] * logx[None, :]) / safe[:, None])
    var = t.var(axis=1)
    return (lams - 1) * logx.sum() - 0.5 * len(x) * np.log(var)


def boxcox_lambda_dense(x, lo=-5.0, hi=5.0):
    """Coarse-then-fine dense grid maximiser of :func:`boxcox_llf_grid`."""
    grid = np.linspace(lo, hi, 1001)
    k = int(np.nanargmax(boxcox_llf_grid(x, grid)))
    fine = np.linspace(grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)], 1001)
    return float(fine[int(np.nanargmax(boxcox_llf_grid(x, fine)))])
