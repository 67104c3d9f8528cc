"""Binary soft-margin kernel SVM trained by SMO, with Platt calibration."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.special import expit

from isakit import kernels
from isakit.errors import SingleClassInput

# Far inside the 1e-3 KKT contract so decision values are order-independent to ~1e-8.
DEFAULT_TOL = 1e-8


class KernelKind(str, Enum):
    RBF = "rbf"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class Kernel:
    kind: KernelKind = KernelKind.RBF
    gamma: float = 1.0
    degree: int = 3
    coef0: float = 1.0

    @classmethod
    def rbf(cls, gamma: float) -> "Kernel":
        return cls(KernelKind.RBF, gamma)

    @classmethod
    def polynomial(cls, gamma: float, degree: int = 3, coef0: float = 1.0) -> "Kernel":
        return cls(KernelKind.POLYNOMIAL, gamma, degree, coef0)

    def __call__(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Gram matrix between the rows of ``u`` and the rows of ``v``."""
        u = np.atleast_2d(np.asarray(u, dtype=np.float64))
        v = np.atleast_2d(np.asarray(v, dtype=np.float64))
        if self.kind is KernelKind.RBF:
            sq = (
                np.sum(u * u, axis=1)[:, None]
                + np.sum(v * v, axis=1)[None, :]
                - 2.0 * (u @ v.T)
            )
            return np.exp(-self.gamma * np.maximum(sq, 0.0))
        return (self.gamma * (u @ v.T) + self.coef0) ** self.degree


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    kernel: Kernel
    cost: float
    support_indices: np.ndarray
    n_iter: int = 0
    kkt_gap: float = 0.0

    def __post_init__(self) -> None:
        for name in ("support_vectors", "dual_coefs", "support_indices"):
            arr = np.array(getattr(self, name), copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def decision(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if len(self.dual_coefs) == 0:
            return np.full(len(pts), self.bias)
        return self.kernel(pts, self.support_vectors) @ self.dual_coefs + self.bias

    def predict(self, points) -> np.ndarray:
        return np.where(self.decision(points) >= 0, 1, -1)


def decision(model: SvmModel, point) -> float:
    """Decision value sum_i coef_i K(sv_i, point) + bias for a single point."""
    return float(model.decision(np.asarray(point, dtype=np.float64).reshape(1, -1))[0])


def train_gram(
    K: np.ndarray,
    labels: np.ndarray,
    cost: float,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: Optional[int] = None,
) -> tuple[np.ndarray, float, int, float]:
    """Run SMO on a precomputed Gram matrix; returns (alpha, bias, n_iter, gap)."""
    y = np.where(np.asarray(labels) > 0, 1.0, -1.0)
    n = len(y)
    if max_iter is None:
        max_iter = 10 * n * n
    alpha, rho, n_iter, gap = kernels.smo_solve(K, y, float(cost), float(tol), int(max_iter))
    return np.asarray(alpha), -float(rho), int(n_iter), float(gap)


def train(
    points,
    labels,
    cost: float,
    kernel: Kernel,
    seed: int = 0,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: Optional[int] = None,
) -> SvmModel:
    """Fit a soft-margin SVM.

    The seed fixes the scan order in which the solver breaks ties between
    equally violating points; ``max_iter`` defaults to 10 passes of n pair
    updates each.
    """
    X = np.asarray(points, dtype=np.float64)
    y = np.where(np.asarray(labels) > 0, 1.0, -1.0)
    if len(X) < 2 or len(np.unique(y)) < 2:
        raise SingleClassInput("training labels contain a single class")
    if cost <= 0:
        raise ValueError("cost must be positive")
    order = np.random.default_rng(seed).permutation(len(y))
    Xp, yp = X[order], y[order]
    alpha_p, bias, n_iter, gap = train_gram(kernel(Xp, Xp), yp, cost, tol=tol, max_iter=max_iter)
    alpha = np.empty_like(alpha_p)
    alpha[order] = alpha_p
    sv = np.flatnonzero(alpha > 0)
    return SvmModel(
        support_vectors=X[sv],
        dual_coefs=alpha[sv] * y[sv],
        bias=bias,
        kernel=kernel,
        cost=float(cost),
        support_indices=sv,
        n_iter=n_iter,
        kkt_gap=gap,
    )


def kkt_violation(alpha: np.ndarray, labels: np.ndarray, K: np.ndarray, cost: float) -> float:
    """Maximal pairwise KKT violation m(alpha) - M(alpha) of the dual (>= 0 at optimum)."""
    y = np.where(np.asarray(labels) > 0, 1.0, -1.0)
    grad = y * (K @ (alpha * y)) - 1.0
    score = -y * grad
    up = ((y > 0) & (alpha < cost)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < cost))
    if not up.any() or not low.any():
        return 0.0
    return max(0.0, float(score[up].max() - score[low].min()))


# ------------------------------------------------------------------- Platt


@dataclass(frozen=True)
class PlattScaler:
    """Maps a decision value s to P(+1 | s) = 1 / (1 + exp(a*s + b))."""

    a: float = -1.0
    b: float = 0.0

    def __call__(self, s) -> np.ndarray:
        return expit(-(self.a * np.asarray(s, dtype=np.float64) + self.b))


def fit_sigmoid(
    decisions,
    targets,
    *,
    tol: float = 1e-8,
    max_iter: int = 100,
    a0: float = 0.0,
    b0: float = 0.0,
) -> PlattScaler:
    """Newton fit of a sigmoid to target probabilities (cross-entropy loss).

    Follows the safeguarded Newton iteration of Lin, Lin & Weng: a tiny ridge
    on the Hessian and Armijo backtracking.
    """
    s = np.asarray(decisions, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    ridge, min_step = 1e-12, 1e-10

    def loss(a: float, b: float) -> float:
        f = a * s + b
        return float(np.sum(np.where(f >= 0, t * f + np.log1p(np.exp(-np.abs(f))),
                                     (t - 1) * f + np.log1p(np.exp(-np.abs(f))))))

    a, b = a0, b0
    fval = loss(a, b)
    for _ in range(max_iter):
        p = expit(-(a * s + b))
        q = 1.0 - p
        pq = p * q
        h11 = ridge + np.dot(s * s, pq)
        h22 = ridge + np.sum(pq)
        h21 = np.dot(s, pq)
        d2 = t - p
        g1 = np.dot(s, d2)
        g2 = np.sum(d2)
        if abs(g1) < tol and abs(g2) < tol:
            break
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= min_step:
            na, nb = a + step * da, b + step * db
            nf = loss(na, nb)
            if nf < fval + 1e-4 * step * gd:
                a, b, fval = na, nb, nf
                break
            step /= 2.0
        else:
            break
    return PlattScaler(float(a), float(b))


def platt_probability(decisions, labels) -> PlattScaler:
    """Calibrate decision values against +1/-1 labels.

    Uses smoothed targets so perfectly separated data still yields a finite
    fit; falls back to the unit sigmoid when a class is missing or the fit
    is not finite.
    """
    s = np.asarray(decisions, dtype=np.float64)
    y = np.asarray(labels) > 0
    n_pos = int(np.count_nonzero(y))
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0 or not np.all(np.isfinite(s)):
        return PlattScaler()
    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    targets = np.where(y, hi, lo)
    scaler = fit_sigmoid(s, targets, b0=float(np.log((n_neg + 1.0) / (n_pos + 1.0))))
    if not (np.isfinite(scaler.a) and np.isfinite(scaler.b)):
        return PlattScaler()
    return scaler
