"""Planar geometry used by the boundary and footprint stages.

Areas, containment and the convex hull are computed directly; polygon
boolean operations delegate to shapely's overlay engine, and Delaunay
triangulation to scipy (qhull).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import shapely
from scipy.spatial import Delaunay, QhullError
from shapely import geometry as sg
from shapely.geometry.polygon import orient

from isakit import kernels
from isakit.errors import Degenerate, InvalidPolygon


def _ring(points) -> np.ndarray:
    arr = np.array(points, dtype=np.float64, copy=True).reshape(-1, 2)
    if len(arr) > 1 and np.array_equal(arr[0], arr[-1]):
        arr = arr[:-1]
    arr.setflags(write=False)
    return arr


def signed_area(ring: np.ndarray) -> float:
    """Shoelace area; positive for counter-clockwise rings."""
    r = np.asarray(ring, dtype=np.float64)
    if len(r) < 3:
        return 0.0
    x, y = r[:, 0], r[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True)
class Polygon:
    """Simple polygon with optional holes.

    The exterior is stored counter-clockwise and holes clockwise; the closing
    vertex is implicit.
    """

    exterior: np.ndarray
    holes: tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self) -> None:
        ext = _ring(self.exterior)
        if signed_area(ext) < 0:
            ext = _ring(ext[::-1])
        holes = []
        for h in self.holes:
            hr = _ring(h)
            if signed_area(hr) > 0:
                hr = _ring(hr[::-1])
            holes.append(hr)
        object.__setattr__(self, "exterior", ext)
        object.__setattr__(self, "holes", tuple(holes))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polygon):
            return NotImplemented
        return (
            np.array_equal(self.exterior, other.exterior)
            and len(self.holes) == len(other.holes)
            and all(np.array_equal(a, b) for a, b in zip(self.holes, other.holes))
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def area(self) -> float:
        return area(self)

    def to_shapely(self) -> sg.Polygon:
        return sg.Polygon(self.exterior, [h for h in self.holes])


def area(p: Polygon) -> float:
    """Exterior shoelace area minus the hole areas."""
    return signed_area(p.exterior) - sum(-signed_area(h) for h in p.holes)


def total_area(polygons: Iterable[Polygon]) -> float:
    return float(sum(area(p) for p in polygons))


def _on_segment(px, py, x1, y1, x2, y2, tol) -> np.ndarray:
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    seg_len = np.hypot(x2 - x1, y2 - y1)
    close = np.abs(cross) <= tol * np.maximum(seg_len, 1.0)
    within = (
        (np.minimum(x1, x2) - tol <= px) & (px <= np.maximum(x1, x2) + tol)
        & (np.minimum(y1, y2) - tol <= py) & (py <= np.maximum(y1, y2) + tol)
    )
    return close & within


def _ring_parity(ring: np.ndarray, px, py, tol):
    """(inside-by-even-odd, on-boundary) for arrays of query points."""
    inside = np.zeros(px.shape, dtype=bool)
    on_edge = np.zeros(px.shape, dtype=bool)
    xs, ys = ring[:, 0], ring[:, 1]
    for k in range(len(ring)):
        x1, y1 = xs[k], ys[k]
        x2, y2 = xs[(k + 1) % len(ring)], ys[(k + 1) % len(ring)]
        on_edge |= _on_segment(px, py, x1, y1, x2, y2, tol)
        crosses = (y1 > py) != (y2 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (px < x_at)
    return inside, on_edge


def contains_points(p: Polygon, points) -> np.ndarray:
    """Vectorised even-odd containment; points on any ring count as inside."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    px, py = pts[:, 0], pts[:, 1]
    scale = max(1.0, float(np.max(np.abs(p.exterior))))
    tol = 1e-12 * scale
    inside, on_edge = _ring_parity(p.exterior, px, py, tol)
    for h in p.holes:
        h_in, h_edge = _ring_parity(h, px, py, tol)
        inside ^= h_in
        on_edge |= h_edge
    return inside | on_edge


def contains(p: Polygon, q) -> bool:
    return bool(contains_points(p, np.asarray(q, dtype=np.float64).reshape(1, 2))[0])


def contains_any(polygons: Sequence[Polygon], points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    mask = np.zeros(len(pts), dtype=bool)
    for p in polygons:
        mask |= contains_points(p, pts)
    return mask


def convex_hull(points) -> Polygon:
    """Andrew's monotone chain; counter-clockwise, collinear vertices dropped."""
    pts = np.unique(np.asarray(points, dtype=np.float64).reshape(-1, 2), axis=0)
    if len(pts) < 3:
        raise Degenerate("convex hull needs at least 3 distinct points")

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for pt in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    upper: list[np.ndarray] = []
    for pt in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise Degenerate("points are collinear")
    return Polygon(np.array(hull))


def _polygon_parts(geom) -> list:
    if isinstance(geom, sg.Polygon):
        return [geom]
    if hasattr(geom, "geoms"):
        out = []
        for g in geom.geoms:
            out.extend(_polygon_parts(g))
        return out
    return []


def from_shapely(geom) -> list[Polygon]:
    """Polygonal parts of a shapely geometry (lines and points are dropped)."""
    if geom is None or geom.is_empty:
        return []
    out = []
    for g in _polygon_parts(geom):
        if g.area <= 0:
            continue
        g = orient(g, 1.0)
        holes = tuple(np.array(r.coords) for r in g.interiors)
        out.append(Polygon(np.array(g.exterior.coords), holes))
    return out


def _valid(p: Polygon) -> sg.Polygon:
    if len(p.exterior) < 3:
        raise InvalidPolygon("polygon needs at least 3 vertices")
    g = p.to_shapely()
    if not g.is_valid:
        raise InvalidPolygon(shapely.is_valid_reason(g))
    return g


def to_multipolygon(polygons: Sequence[Polygon]):
    if not polygons:
        return sg.GeometryCollection()
    return shapely.union_all([_valid(p) for p in polygons])


def intersect(p: Polygon, q: Polygon) -> list[Polygon]:
    return from_shapely(_valid(p).intersection(_valid(q)))


def difference(p: Polygon, q: Polygon) -> list[Polygon]:
    return from_shapely(_valid(p).difference(_valid(q)))


def union(polygons: Sequence[Polygon]) -> list[Polygon]:
    return from_shapely(to_multipolygon(polygons))


def intersect_sets(ps: Sequence[Polygon], qs: Sequence[Polygon]) -> list[Polygon]:
    if not ps or not qs:
        return []
    return from_shapely(to_multipolygon(ps).intersection(to_multipolygon(qs)))


def difference_sets(ps: Sequence[Polygon], qs: Sequence[Polygon]) -> list[Polygon]:
    if not ps:
        return []
    if not qs:
        return list(ps)
    return from_shapely(to_multipolygon(ps).difference(to_multipolygon(qs)))


def circumradii(points: np.ndarray, simplices: np.ndarray) -> np.ndarray:
    pa, pb, pc = (points[simplices[:, k]] for k in range(3))
    a = np.linalg.norm(pb - pc, axis=1)
    b = np.linalg.norm(pc - pa, axis=1)
    c = np.linalg.norm(pa - pb, axis=1)
    twice_area = np.abs(
        (pb[:, 0] - pa[:, 0]) * (pc[:, 1] - pa[:, 1])
        - (pb[:, 1] - pa[:, 1]) * (pc[:, 0] - pa[:, 0])
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        r = a * b * c / (2.0 * twice_area)
    return np.where(twice_area > 0, r, np.inf)


def concave_hull(points, alpha: float) -> list[Polygon]:
    """Alpha shape: union of Delaunay triangles with circumradius <= 1/alpha.

    Returns an empty list when no triangle survives the filter.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 3:
        raise Degenerate("alpha shape needs at least 3 points")
    centred = pts - pts.mean(axis=0)
    if np.linalg.matrix_rank(centred, tol=1e-12 * max(1.0, np.abs(centred).max())) < 2:
        raise Degenerate("points are collinear")
    try:
        tri = Delaunay(pts)
    except QhullError as exc:
        raise Degenerate(str(exc)) from exc
    simplices = tri.simplices
    keep = circumradii(pts, simplices) <= 1.0 / alpha
    if not keep.any():
        return []
    triangles = [sg.Polygon(pts[s]) for s in simplices[keep]]
    return from_shapely(shapely.union_all(triangles))


def dbscan(points, eps: float, min_pts: int) -> np.ndarray:
    """Density clustering with closed eps-balls; -1 marks noise.

    Cluster ids are dense from 0 in discovery order of their first core
    point, scanning the input in order.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_pts < 1:
        raise ValueError("min_pts must be >= 1")
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    return np.asarray(kernels.dbscan(pts, float(eps), int(min_pts)), dtype=np.int64)
