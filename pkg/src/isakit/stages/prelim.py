"""PRELIM: good/best labels, outlier bounding and Box-Cox + z-score normalisation."""

from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np

from isakit.datamodel import IsaOptions, NormParams, PerfOptions, PrelimOut, PrepOut
from isakit.errors import DegenerateColumn

log = logging.getLogger(__name__)

LAMBDA_RANGE = (-5.0, 5.0)
LAMBDA_TOL = 1e-5
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Binarized(NamedTuple):
    y_bin: np.ndarray
    y_best: np.ndarray
    p_best: np.ndarray
    best_ties: np.ndarray


def binarize(y, perf: PerfOptions) -> Binarized:
    """Label each (instance, algorithm) as good or bad.

    With ``abs_perf`` the threshold is ``epsilon`` itself; otherwise it is
    relative to the instance's best value, ``(1 + epsilon) * best`` when
    minimising and ``(1 - epsilon) * best`` when maximising.
    """
    y = np.asarray(y, dtype=np.float64)
    if perf.max_perf:
        y_best = y.max(axis=1)
        p_best = np.argmax(y, axis=1)
        if perf.abs_perf:
            y_bin = y >= perf.epsilon
        else:
            y_bin = y >= (1.0 - perf.epsilon) * y_best[:, None]
    else:
        y_best = y.min(axis=1)
        p_best = np.argmin(y, axis=1)
        if perf.abs_perf:
            y_bin = y <= perf.epsilon
        else:
            y_bin = y <= (1.0 + perf.epsilon) * y_best[:, None]
    ties = np.sum(y == y_best[:, None], axis=1)
    return Binarized(y_bin, y_best, p_best.astype(np.int64), ties.astype(np.int64))


def best_mask(y, y_best) -> np.ndarray:
    """True where an algorithm attains the instance optimum (ties included)."""
    return np.asarray(y) == np.asarray(y_best)[:, None]


def beta_easy(y_bin, beta_threshold: float) -> np.ndarray:
    y_bin = np.asarray(y_bin, dtype=bool)
    return y_bin.sum(axis=1) / y_bin.shape[1] >= beta_threshold


def type7_quartiles(col: np.ndarray) -> tuple[float, float, float]:
    q1, med, q3 = np.quantile(col, [0.25, 0.5, 0.75], method="linear")
    return float(q1), float(med), float(q3)


class Bounded(NamedTuple):
    x_bounded: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def bound(x, iqr_multiplier: float = 5.0) -> Bounded:
    """Clip each column to median +- k*IQR; zero-IQR columns pass through.

    Infinite cells are clipped to the bounds (or to the finite extremes of a
    zero-IQR column).
    """
    x = np.array(x, dtype=np.float64)
    n, f = x.shape
    lower = np.full(f, -np.inf)
    upper = np.full(f, np.inf)
    for j in range(f):
        col = x[:, j]
        finite = col[np.isfinite(col)]
        q1, med, q3 = type7_quartiles(finite if finite.size else col)
        iqr = q3 - q1
        if iqr > 0 and np.isfinite(iqr):
            lower[j] = med - iqr_multiplier * iqr
            upper[j] = med + iqr_multiplier * iqr
            x[:, j] = np.clip(col, lower[j], upper[j])
        elif finite.size:
            x[:, j] = np.clip(col, finite.min(), finite.max())
    return Bounded(x, lower, upper)


def box_cox(x, lam: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if abs(lam) < 1e-12:
        return np.log(x)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.expm1(lam * np.log(x)) / lam


def inverse_box_cox(t, lam: float) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if abs(lam) < 1e-12:
        return np.exp(t)
    return np.exp(np.log1p(lam * t) / lam)


def box_cox_loglik(x, lam: float) -> float:
    """Profile log-likelihood of the Box-Cox parameter for positive data."""
    x = np.asarray(x, dtype=np.float64)
    t = box_cox(x, lam)
    if not np.all(np.isfinite(t)):
        return -np.inf
    var = np.var(t)
    if not np.isfinite(var) or var <= 0:
        return -np.inf
    return float((lam - 1.0) * np.sum(np.log(x)) - 0.5 * len(x) * np.log(var))


def golden_section_max(fn, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def fit_box_cox_lambda(x) -> float:
    return golden_section_max(lambda lam: box_cox_loglik(x, lam), *LAMBDA_RANGE, LAMBDA_TOL)


def normalize_column(col) -> tuple[np.ndarray, NormParams]:
    col = np.asarray(col, dtype=np.float64)
    shift = 1.0 - float(col.min())
    shifted = col + shift
    if np.all(shifted == shifted[0]):
        raise DegenerateColumn("column is constant after shifting")
    lam = fit_box_cox_lambda(shifted)
    t = box_cox(shifted, lam)
    mean = float(t.mean())
    std = float(t.std(ddof=1))
    if not (std > 0 and np.isfinite(std)):
        raise DegenerateColumn(f"column has zero spread after Box-Cox (lambda={lam:.4g})")
    return (t - mean) / std, NormParams(shift, lam, mean, std)


class Normalized(NamedTuple):
    x_norm: np.ndarray
    params: tuple[NormParams, ...]


def normalize(x, allow_constant: bool = False) -> Normalized:
    """Shift to min 1, Box-Cox with ML lambda, then z-score, column by column.

    Constant columns raise DegenerateColumn unless ``allow_constant``, in
    which case they map to zeros.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    params = []
    for j in range(x.shape[1]):
        try:
            out[:, j], p = normalize_column(x[:, j])
        except DegenerateColumn:
            if not allow_constant:
                raise
            shift = 1.0 - float(x[:, j].min())
            p = NormParams(shift, 1.0, float(box_cox(x[:, j] + shift, 1.0).mean()), 1.0)
            out[:, j] = apply_norm_params(x[:, j], p)
        params.append(p)
    return Normalized(out, tuple(params))


def apply_norm_params(col, p: NormParams) -> np.ndarray:
    col = np.asarray(col, dtype=np.float64)
    if math.isnan(p.box_cox_lambda):
        return (col - p.mean) / p.stddev
    return (box_cox(col + p.shift, p.box_cox_lambda) - p.mean) / p.stddev


def invert_norm_params(z, p: NormParams) -> np.ndarray:
    t = np.asarray(z, dtype=np.float64) * p.stddev + p.mean
    if math.isnan(p.box_cox_lambda):
        return t
    return inverse_box_cox(t, p.box_cox_lambda) - p.shift


def _identity(m: np.ndarray) -> Normalized:
    return Normalized(m.copy(), tuple(NormParams(0.0, math.nan, 0.0, 1.0) for _ in range(m.shape[1])))


def run_prelim(prep: PrepOut, options: IsaOptions) -> PrelimOut:
    md = prep.metadata_clean
    labels = binarize(md.y, options.perf)
    easy = beta_easy(labels.y_bin, options.perf.beta_threshold)

    if options.bound.enabled:
        bounded = bound(md.x, options.bound.iqr_multiplier)
    else:
        f = md.x.shape[1]
        bounded = Bounded(np.array(md.x), np.full(f, -np.inf), np.full(f, np.inf))

    if options.norm.enabled:
        xn = normalize(bounded.x_bounded)
        y = np.asarray(md.y, dtype=np.float64)
        constant = [j for j in range(y.shape[1]) if np.all(y[:, j] == y[0, j])]
        for j in constant:
            log.warning("performance of %s is constant; its normalised column is zero",
                        md.algorithm_names[j])
        yn = normalize(y, allow_constant=True)
    else:
        xn = _identity(bounded.x_bounded)
        yn = _identity(np.asarray(md.y, dtype=np.float64))

    return PrelimOut(
        y_bin=labels.y_bin,
        y_best=labels.y_best,
        p_best=labels.p_best,
        best_ties=labels.best_ties,
        beta_easy=easy,
        x_bounded=bounded.x_bounded,
        lower_bounds=bounded.lower,
        upper_bounds=bounded.upper,
        x_norm=xn.x_norm,
        norm_params=xn.params,
        y_norm=yn.x_norm,
        y_norm_params=yn.params,
    )
