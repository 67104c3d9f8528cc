"""CLOISTER: boundary of the instance space from projected feature-range corners."""

from __future__ import annotations

import logging

import numpy as np
from scipy import stats

from isakit.datamodel import CloisterOut, IsaOptions, PrelimOut, ProjectionModel, SiftedOut
from isakit.errors import Degenerate, DegenerateBoundary, TooManyFeatures
from isakit.geometry import convex_hull
from isakit.stages.sifted import pearson_columns

log = logging.getLogger(__name__)

MAX_FEATURES = 20
_CHUNK = 1 << 14


def _check_size(f: int) -> None:
    if f > MAX_FEATURES:
        raise TooManyFeatures(f"{f} features would give 2^{f} corners (limit {MAX_FEATURES})")


def corner_bits(f: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Lo/hi choice bits (True = hi), most significant bit = first feature."""
    codes = np.arange(start, (1 << f) if stop is None else stop)[:, None]
    return ((codes >> (f - 1 - np.arange(f))[None, :]) & 1).astype(bool)


def generate_corners(lo, hi) -> np.ndarray:
    """All 2^f corners as rows, in lexicographic order of the lo/hi bits."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    _check_size(len(lo))
    return np.where(corner_bits(len(lo)), hi, lo)


def significant_correlation(corr, n: int, p_val: float) -> np.ndarray:
    """Zero out correlations whose two-sided t-test p-value exceeds ``p_val``."""
    corr = np.asarray(corr, dtype=np.float64)
    if n <= 2:
        return np.zeros_like(corr)
    r = np.clip(corr, -1.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = r * np.sqrt((n - 2) / np.maximum(1.0 - r * r, 0.0))
    p = np.where(np.abs(r) >= 1.0, 0.0, 2.0 * stats.t.sf(np.abs(t), df=n - 2))
    return np.where(p <= p_val, corr, 0.0)


def _keep_mask(bits: np.ndarray, corr: np.ndarray, c_thres: float) -> np.ndarray:
    keep = np.ones(len(bits), dtype=bool)
    f = bits.shape[1]
    for i in range(f):
        for j in range(i + 1, f):
            if corr[i, j] > c_thres:
                keep &= bits[:, i] == bits[:, j]
            elif corr[i, j] < -c_thres:
                keep &= bits[:, i] != bits[:, j]
    return keep


def prune_corners(corners, corr, c_thres: float) -> np.ndarray:
    """Keep corners consistent with strongly correlated feature pairs.

    ``corners`` must be the full list from :func:`generate_corners`.  A pair
    with corr > c_thres must sit at the same extreme, one with corr < -c_thres
    at opposite extremes; weaker pairs are unconstrained.
    """
    corners = np.asarray(corners, dtype=np.float64)
    corr = np.asarray(corr, dtype=np.float64)
    f = corr.shape[0]
    if len(corners) != 1 << f:
        raise ValueError(f"expected {1 << f} corners, got {len(corners)}")
    return corners[_keep_mask(corner_bits(f), corr, c_thres)].reshape(-1, f)


def boundary_hull(kept, a) -> CloisterOut:
    """Convex hull of the corners projected through ``a`` (2 x f)."""
    kept = np.asarray(kept, dtype=np.float64)
    if len(kept) < 3:
        raise DegenerateBoundary(f"only {len(kept)} corners kept")
    return _hull(kept @ np.asarray(a).T, len(kept), len(kept))


def _hull(projected: np.ndarray, total: int, kept: int) -> CloisterOut:
    if len(projected) < 3:
        raise DegenerateBoundary(f"only {len(projected)} corners kept")
    try:
        hull = convex_hull(projected)
    except Degenerate as exc:
        raise DegenerateBoundary(str(exc)) from exc
    return CloisterOut(boundary=hull, corners_total=total, corners_kept=kept)


def projected_kept_corners(lo, hi, corr, c_thres: float, a) -> np.ndarray:
    """Project the surviving corners chunk by chunk (memory ~ chunk x f)."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    f = len(lo)
    _check_size(f)
    a = np.asarray(a, dtype=np.float64)
    out = []
    for start in range(0, 1 << f, _CHUNK):
        bits = corner_bits(f, start, min(start + _CHUNK, 1 << f))
        bits = bits[_keep_mask(bits, corr, c_thres)]
        if len(bits):
            out.append(np.where(bits, hi, lo) @ a.T)
    return np.concatenate(out) if out else np.zeros((0, 2))


def run_cloister(
    prelim: PrelimOut, sifted: SiftedOut, projection: ProjectionModel, options: IsaOptions
) -> CloisterOut:
    x = np.asarray(prelim.x_norm)[:, sifted.selected_feature_indices]
    lo, hi = x.min(axis=0), x.max(axis=0)
    corr = significant_correlation(pearson_columns(x, x), x.shape[0], options.cloister.p_val)
    projected = projected_kept_corners(lo, hi, corr, options.cloister.c_thres, projection.a)
    total = 1 << x.shape[1]
    try:
        return _hull(projected, total, len(projected))
    except DegenerateBoundary as exc:
        log.warning("instance space boundary is degenerate: %s", exc)
        return CloisterOut(boundary=None, corners_total=total, corners_kept=len(projected),
                           warning=str(exc))
