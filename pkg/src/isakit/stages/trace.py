"""TRACE: good/best/beta footprints, contradiction removal and the summary table."""

from __future__ import annotations

import dataclasses
import math
from typing import Optional, Sequence

import numpy as np

from isakit import geometry
from isakit.datamodel import (
    Footprint,
    FootprintKind,
    FootprintSummaryRow,
    IsaOptions,
    PrelimOut,
    PrepOut,
    ProjectionModel,
    PythiaOut,
    TraceOut,
)
from isakit.errors import Degenerate
from isakit.geometry import Polygon
from isakit.parallel import pmap
from isakit.stages.prelim import best_mask

BETA_NAME = "beta_easy"
SELECTOR_NAME = "Selector"
MIN_AREA = 1e-12


NEIGHBOUR_FACTOR = 2.0


def default_eps(points, min_pts: int) -> float:
    """Radius expected to hold ``2 * min_pts`` points were the masked points
    spread uniformly over their bounding box."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        return math.nan
    span = pts.max(axis=0) - pts.min(axis=0)
    box = float(np.prod(span))
    if box <= 0:
        return math.nan
    return math.sqrt(box * NEIGHBOUR_FACTOR * min_pts / (len(pts) * math.pi))


def default_alpha(eps: float) -> float:
    """Keep triangles up to twice the clustering radius."""
    return 1.0 / (2.0 * eps)


def covered_area(polygons: Sequence[Polygon]) -> float:
    """Area of the union; the plain sum when the polygons are disjoint."""
    if len(polygons) < 2:
        return geometry.total_area(polygons)
    return geometry.total_area(geometry.union(polygons))


def _metrics(polygons: Sequence[Polygon], z, mask) -> tuple[float, float, float]:
    area = covered_area(polygons)
    if not polygons or area <= 0:
        return 0.0, 0.0, 1.0
    inside = geometry.contains_any(polygons, z)
    n_in = int(np.count_nonzero(inside))
    n_label = int(np.count_nonzero(inside & mask))
    purity = n_label / n_in if n_in else 1.0
    return area, n_label / area, purity


def polygon_purity(p: Polygon, z, mask) -> float:
    inside = geometry.contains_points(p, z)
    n_in = int(np.count_nonzero(inside))
    return int(np.count_nonzero(inside & mask)) / n_in if n_in else 1.0


def make_footprint(algorithm: str, kind, polygons, z, mask) -> Footprint:
    polygons = [p for p in polygons if geometry.area(p) > MIN_AREA]
    area, density, purity = _metrics(polygons, z, np.asarray(mask, dtype=bool))
    return Footprint(algorithm, FootprintKind(kind), tuple(polygons), area, density, purity)


def build_footprint(
    z,
    mask,
    eps: Optional[float] = None,
    min_pts: int = 5,
    alpha: Optional[float] = None,
    purity_pi: float = 0.55,
    *,
    algorithm: str = "",
    kind: FootprintKind | str = FootprintKind.GOOD,
) -> Footprint:
    """Footprint of the instances flagged in ``mask``.

    Masked points are clustered with DBSCAN, each cluster of 3+ points is
    wrapped in an alpha shape, and polygons whose purity against all
    instances falls below ``purity_pi`` are discarded.  ``eps``/``alpha`` of
    None use :func:`default_eps` over the masked points and
    :func:`default_alpha`.
    """
    z = np.asarray(z, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    pts = z[mask]
    empty = make_footprint(algorithm, kind, [], z, mask)
    if len(pts) < 3:
        return empty
    if eps is None:
        eps = default_eps(pts, min_pts)
        if not math.isfinite(eps):
            return empty
    if alpha is None:
        alpha = default_alpha(eps)
    labels = geometry.dbscan(pts, eps, min_pts)
    kept: list[Polygon] = []
    for cid in range(int(labels.max()) + 1 if len(labels) else 0):
        members = pts[labels == cid]
        if len(members) < 3:
            continue
        try:
            shapes = geometry.concave_hull(members, alpha)
        except Degenerate:
            continue
        kept.extend(p for p in shapes if polygon_purity(p, z, mask) >= purity_pi)
    # polygons stay separate so each one keeps its own purity guarantee
    return make_footprint(algorithm, kind, kept, z, mask)


def _overlap_purity(overlap: Sequence[Polygon], z, mask) -> float:
    inside = geometry.contains_any(overlap, z)
    n_in = int(np.count_nonzero(inside))
    return int(np.count_nonzero(inside & mask)) / n_in if n_in else 1.0


def remove_contradictions(footprints: Sequence[Footprint], z, masks) -> list[Footprint]:
    """Make best-footprints pairwise disjoint.

    Pairs are visited in ascending (i, j) order; the overlap goes to the
    footprint with the higher purity inside the overlap (ties: larger total
    area, then lower index) and is cut out of the other.
    """
    fps = list(footprints)
    z = np.asarray(z, dtype=np.float64)
    masks = [np.asarray(m, dtype=bool) for m in masks]
    for i in range(len(fps)):
        for j in range(i + 1, len(fps)):
            if not fps[i].polygons or not fps[j].polygons:
                continue
            overlap = [
                p for p in geometry.intersect_sets(fps[i].polygons, fps[j].polygons)
                if geometry.area(p) > MIN_AREA
            ]
            if not overlap:
                continue
            pi = _overlap_purity(overlap, z, masks[i])
            pj = _overlap_purity(overlap, z, masks[j])
            if pi > pj or (pi == pj and fps[i].area >= fps[j].area):
                loser = j
            else:
                loser = i
            f = fps[loser]
            remaining = geometry.difference_sets(f.polygons, overlap)
            fps[loser] = make_footprint(f.algorithm, f.kind, remaining, z, masks[loser])
    return fps


def whole_space(z) -> tuple[Polygon, float, float]:
    hull = geometry.convex_hull(z)
    area = geometry.area(hull)
    return hull, area, len(np.asarray(z)) / area


def normalized(fp: Footprint, space_area: float, space_density: float) -> Footprint:
    return dataclasses.replace(
        fp, area_norm=fp.area / space_area, density_norm=fp.density / space_density
    )


def summarize(
    footprints: Sequence[Footprint], algorithm_names: Sequence[str]
) -> tuple[FootprintSummaryRow, ...]:
    """One row per algorithm from its (already normalised) good and best footprints."""
    index = {(fp.algorithm, fp.kind): fp for fp in footprints}
    rows = []
    for name in algorithm_names:
        good = index[(name, FootprintKind.GOOD)]
        best = index[(name, FootprintKind.BEST)]
        rows.append(FootprintSummaryRow(
            algorithm=name,
            area_good_norm=good.area_norm,
            density_good_norm=good.density_norm,
            purity_good=good.purity,
            area_best_norm=best.area_norm,
            density_best_norm=best.density_norm,
            purity_best=best.purity,
        ))
    return tuple(rows)


def run_trace(
    prep: PrepOut,
    prelim: PrelimOut,
    projection: ProjectionModel,
    pythia: PythiaOut,
    options: IsaOptions,
) -> TraceOut:
    to = options.trace
    z = np.asarray(projection.z)
    names = prep.metadata_clean.algorithm_names
    n_alg = len(names)
    rows = np.arange(len(z))
    if to.use_sim:
        good = np.asarray(pythia.predicted_good)
        best = np.zeros_like(good)
        best[rows, pythia.selection] = True
    else:
        good = np.asarray(prelim.y_bin)
        best = best_mask(prep.metadata_clean.y, prelim.y_best)
    sel = np.asarray(pythia.selection)
    selector_good = np.asarray(prelim.y_bin)[rows, sel]
    selector_best = best_mask(prep.metadata_clean.y, prelim.y_best)[rows, sel]

    jobs = (
        [(names[j], FootprintKind.GOOD, good[:, j]) for j in range(n_alg)]
        + [(names[j], FootprintKind.BEST, best[:, j]) for j in range(n_alg)]
        + [(BETA_NAME, FootprintKind.BETA, np.asarray(prelim.beta_easy))]
        + [(SELECTOR_NAME, FootprintKind.GOOD, selector_good),
           (SELECTOR_NAME, FootprintKind.BEST, selector_best)]
    )
    built = pmap(
        lambda job: build_footprint(
            z, job[2], to.eps, to.min_pts, to.alpha, to.purity_pi,
            algorithm=job[0], kind=job[1],
        ),
        jobs,
        options.parallel.workers,
    )
    goods = built[:n_alg]
    bests = remove_contradictions(built[n_alg:2 * n_alg], z, [best[:, j] for j in range(n_alg)])
    extras = built[2 * n_alg:]

    _, space_area, space_density = whole_space(z)
    footprints = tuple(normalized(fp, space_area, space_density) for fp in goods + bests + extras)
    return TraceOut(
        footprints=footprints,
        whole_space_area=space_area,
        whole_space_density=space_density,
        summary=summarize(footprints, names),
    )
