"""PILOT: 2-D projection of the selected features.

The projection minimises

    J(A, B, C) = ||X - B A X||_F^2 + ||Y - C A X||_F^2

where X (f x n) holds the normalised selected features and Y (a x n) the
normalised performances, one column per instance.  A maps features to the
plane, B and C reconstruct features and performance from the plane.
"""

from __future__ import annotations

from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from isakit.datamodel import IsaOptions, PrelimOut, ProjectionMethod, ProjectionModel, SiftedOut
from isakit.errors import DimensionMismatch, EigenFailure, OptimizationDiverged
from isakit.parallel import pmap

GTOL = 1e-6
MAX_ITER = 500
RANK_TOL = 1e-10


class Unpacked(NamedTuple):
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray


def n_params(f: int, n_alg: int) -> int:
    return 4 * f + 2 * n_alg


def pack(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.concatenate([np.ravel(a), np.ravel(b), np.ravel(c)])


def unpack(v: np.ndarray, f: int, n_alg: int) -> Unpacked:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n_params(f, n_alg),):
        raise DimensionMismatch(
            f"parameter vector has length {v.size}, expected {n_params(f, n_alg)}"
        )
    return Unpacked(
        v[: 2 * f].reshape(2, f),
        v[2 * f : 4 * f].reshape(f, 2),
        v[4 * f :].reshape(n_alg, 2),
    )


def _shapes(v, xbar, ybar) -> tuple[np.ndarray, np.ndarray, Unpacked]:
    xbar = np.asarray(xbar, dtype=np.float64)
    ybar = np.asarray(ybar, dtype=np.float64)
    if xbar.ndim != 2 or ybar.ndim != 2 or xbar.shape[1] != ybar.shape[1]:
        raise DimensionMismatch(
            f"x has shape {xbar.shape} and y has shape {ybar.shape}; need matching columns"
        )
    return xbar, ybar, unpack(v, xbar.shape[0], ybar.shape[0])


def objective(v, xbar, ybar) -> float:
    xbar, ybar, (a, b, c) = _shapes(v, xbar, ybar)
    z = a @ xbar
    rx = xbar - b @ z
    ry = ybar - c @ z
    return float(np.sum(rx * rx) + np.sum(ry * ry))


def gradient(v, xbar, ybar) -> np.ndarray:
    xbar, ybar, (a, b, c) = _shapes(v, xbar, ybar)
    z = a @ xbar
    rx = xbar - b @ z
    ry = ybar - c @ z
    grad_b = -2.0 * rx @ z.T
    grad_c = -2.0 * ry @ z.T
    grad_a = -2.0 * (b.T @ rx + c.T @ ry) @ xbar.T
    return pack(grad_a, grad_b, grad_c)


def _value_and_grad(v, xbar, ybar):
    return objective(v, xbar, ybar), gradient(v, xbar, ybar)


def _model(v, xbar, ybar, method: ProjectionMethod) -> ProjectionModel:
    a, b, c = unpack(v, xbar.shape[0], ybar.shape[0])
    return ProjectionModel(
        a=a, b=b, c=c, z=(a @ xbar).T, error=objective(v, xbar, ybar), method=method
    )


def _bfgs(v0, xbar, ybar) -> np.ndarray:
    res = minimize(
        _value_and_grad,
        v0,
        args=(xbar, ybar),
        jac=True,
        method="BFGS",
        options={"gtol": GTOL, "maxiter": MAX_ITER},
    )
    return np.asarray(res.x)


def random_starts(f: int, n_alg: int, n_tries: int, seed: int) -> list[np.ndarray]:
    """Uniform [-1, 1] starts; start k is the same for any n_tries > k."""
    rng = np.random.default_rng(seed)
    return [rng.uniform(-1.0, 1.0, n_params(f, n_alg)) for _ in range(n_tries)]


def numeric_solve(
    xbar,
    ybar,
    n_tries: int = 5,
    seed: int = 0,
    *,
    extra_starts: Sequence[np.ndarray] = (),
    workers: int = 1,
) -> ProjectionModel:
    """Multi-start BFGS on J; the lowest final J wins (earlier start on ties).

    ``extra_starts`` are tried before the random ones.
    """
    xbar = np.asarray(xbar, dtype=np.float64)
    ybar = np.asarray(ybar, dtype=np.float64)
    if xbar.shape[0] < 2 or xbar.shape[1] < 3:
        raise DimensionMismatch("numeric projection needs f >= 2 features and n >= 3 instances")
    starts = list(extra_starts) + random_starts(xbar.shape[0], ybar.shape[0], n_tries, seed)
    solutions = pmap(lambda v0: _bfgs(v0, xbar, ybar), starts, workers)
    best: Optional[tuple[float, np.ndarray]] = None
    for v in solutions:
        j = objective(v, xbar, ybar)
        if np.isfinite(j) and (best is None or j < best[0]):
            best = (j, v)
    if best is None:
        raise OptimizationDiverged("every BFGS start produced a non-finite objective")
    return _model(best[1], xbar, ybar, ProjectionMethod.NUMERIC)


def analytic_solve(xbar, ybar) -> ProjectionModel:
    """Project on the top-2 eigenvectors of X X^T; B and C by least squares."""
    xbar = np.asarray(xbar, dtype=np.float64)
    ybar = np.asarray(ybar, dtype=np.float64)
    if xbar.shape[0] < 2:
        raise DimensionMismatch("analytic projection needs f >= 2 features")
    if ybar.shape[1] != xbar.shape[1]:
        raise DimensionMismatch("x and y must have one column per instance")
    vals, vecs = np.linalg.eigh(xbar @ xbar.T)
    order = np.argsort(-np.abs(vals), kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    if not (abs(vals[0]) > 0 and abs(vals[1]) > RANK_TOL * abs(vals[0])):
        raise EigenFailure("feature matrix has rank < 2")
    a = vecs[:, :2].T.copy()
    for row in a:
        first = np.flatnonzero(np.abs(row) > 1e-12)[0]
        if row[first] < 0:
            row *= -1.0
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    z = a @ xbar
    b = np.linalg.lstsq(z.T, xbar.T, rcond=None)[0].T
    c = np.linalg.lstsq(z.T, ybar.T, rcond=None)[0].T
    return _model(pack(a, b, c), xbar, ybar, ProjectionMethod.ANALYTIC)


def stage_matrices(prelim: PrelimOut, sifted: SiftedOut) -> tuple[np.ndarray, np.ndarray]:
    xbar = np.asarray(prelim.x_norm)[:, sifted.selected_feature_indices].T
    ybar = np.asarray(prelim.y_norm).T
    return np.ascontiguousarray(xbar), np.ascontiguousarray(ybar)


def run_pilot(prelim: PrelimOut, sifted: SiftedOut, options: IsaOptions) -> ProjectionModel:
    xbar, ybar = stage_matrices(prelim, sifted)
    po = options.pilot
    workers = options.parallel.workers
    if not po.analytic:
        return numeric_solve(xbar, ybar, po.n_tries, po.seed, workers=workers)
    analytic = analytic_solve(xbar, ybar)
    seeded = pack(analytic.a, analytic.b, analytic.c)
    numeric = numeric_solve(xbar, ybar, po.n_tries, po.seed, extra_starts=[seeded], workers=workers)
    return numeric if numeric.error < analytic.error else analytic
