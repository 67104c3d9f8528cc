"""CSV tables and SVG plots of a pipeline model."""

from __future__ import annotations

import csv
import logging
import math
import os
import re
from pathlib import Path
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from isakit import plotstyle as style
from isakit.datamodel import AlgorithmSummary, FootprintKind, TraceOut
from isakit.errors import IoFailure
from isakit.geometry import Polygon

log = logging.getLogger("isakit.report")

COORDINATES_COLUMNS = ("Instances", "z_1", "z_2")
FOOTPRINT_COLUMNS = (
    "Row",
    "Area_Good_Normalized",
    "Density_Good_Normalized",
    "Purity_Good",
    "Area_Best_Normalized",
    "Density_Best_Normalized",
    "Purity_Best",
)
SELECTOR_COLUMNS = (
    "Algorithm",
    "Avg_Perf",
    "Std_Perf",
    "Frac_Good",
    "Avg_Perf_Selected",
    "Std_Perf_Selected",
    "CV_Accuracy",
    "Precision",
    "Recall",
)


def fmt(value) -> str:
    """Up to three decimals, trailing zeros trimmed; NaN/None as empty."""
    if value is None:
        return ""
    v = float(value)
    if math.isnan(v):
        return ""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    text = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise IoFailure(str(path), exc) from exc
    return path


def _selector_cells(row: AlgorithmSummary, kind: str) -> list[str]:
    cells = [
        row.name,
        fmt(row.avg_perf),
        fmt(row.std_perf),
        fmt(row.frac_good),
        fmt(row.avg_perf_selected),
        fmt(row.std_perf_selected),
        fmt(row.cv_accuracy),
        fmt(row.precision),
        fmt(row.recall),
    ]
    if kind == "oracle":
        cells[4:] = [""] * 5
    elif kind == "selector":
        cells[6] = ""
        cells[8] = ""
    return cells


def footprint_rows(trace: TraceOut) -> list[list[str]]:
    return [
        [
            r.algorithm,
            fmt(r.area_good_norm),
            fmt(r.density_good_norm),
            fmt(r.purity_good),
            fmt(r.area_best_norm),
            fmt(r.density_best_norm),
            fmt(r.purity_best),
        ]
        for r in trace.summary
    ]


def write_tables(model, out_dir) -> list[Path]:
    """Write the coordinate, footprint and selector tables present in ``model``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(str(out), exc) from exc
    written: list[Path] = []

    prep, projection = model.data, model.pilot
    if prep is not None and projection is not None:
        z = np.asarray(projection.z)
        ids = prep.metadata_clean.instance_ids
        rows = ([iid, repr(float(a)), repr(float(b))] for iid, (a, b) in zip(ids, z))
        written.append(_write_csv(out / "coordinates.csv", COORDINATES_COLUMNS, rows))
    else:
        log.warning("no projection in model; coordinates.csv skipped")

    if model.trace is not None:
        written.append(
            _write_csv(out / "footprint_summary.csv", FOOTPRINT_COLUMNS, footprint_rows(model.trace))
        )
    else:
        log.warning("no footprints in model; footprint_summary.csv skipped")

    if model.pythia is not None:
        s = model.pythia.summary
        rows = [_selector_cells(r, "algorithm") for r in s.algorithms]
        rows.append(_selector_cells(s.oracle, "oracle"))
        rows.append(_selector_cells(s.selector, "selector"))
        written.append(_write_csv(out / "selector_summary.csv", SELECTOR_COLUMNS, rows))
    else:
        log.warning("no selector in model; selector_summary.csv skipped")
    return written


# SVG


def gradient_color(t: float) -> str:
    """Colour at ``t`` in [0, 1] on the fixed three-stop gradient."""
    t = min(max(t, 0.0), 1.0)
    stops = style.GRADIENT
    for (t0, c0), (t1, c1) in zip(stops, stops[1:]):
        if t <= t1:
            w = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            rgb = [round(a + w * (b - a)) for a, b in zip(c0, c1)]
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*stops[-1][1])


def color_positions(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    finite = v[np.isfinite(v)]
    if finite.size == 0:
        return np.full(v.shape, 0.5)
    lo, hi = float(finite.min()), float(finite.max())
    if hi - lo <= 1e-12 * max(1.0, abs(lo), abs(hi)):
        return np.full(v.shape, 0.5)
    t = (v - lo) / (hi - lo)
    return np.where(np.isfinite(t), t, 0.5)


class Viewport:
    """Affine map from z to SVG pixels with equal scaling and a margin."""

    def __init__(self, z: np.ndarray, size: float = style.VIEWPORT, margin: float = style.MARGIN):
        z = np.asarray(z, dtype=float)
        self.size = size
        self.pad = margin * size
        lo = z.min(axis=0) if len(z) else np.zeros(2)
        hi = z.max(axis=0) if len(z) else np.ones(2)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1]))
        self.scale = (size - 2 * self.pad) / span if span > 0 else 1.0
        # centre the shorter axis
        self.offset = lo - ((span - (hi - lo)) / 2.0 if span > 0 else 0.5 * (size - 2 * self.pad))
        self.lo = lo

    def __call__(self, pts) -> np.ndarray:
        p = np.atleast_2d(np.asarray(pts, dtype=float))
        sx = self.pad + (p[:, 0] - self.offset[0]) * self.scale
        sy = self.size - self.pad - (p[:, 1] - self.offset[1]) * self.scale
        return np.column_stack([sx, sy])


def _num(v: float) -> str:
    return f"{v:.2f}"


def _path_data(poly: Polygon, vp: Viewport) -> str:
    parts = []
    for ring in (poly.exterior, *poly.holes):
        px = vp(ring)
        parts.append(
            "M" + " L".join(f"{_num(x)},{_num(y)}" for x, y in px) + " Z"
        )
    return " ".join(parts)


def _axes(size: float, pad: float) -> list[str]:
    c = style.AXIS_COLOR
    return [
        f'<line x1="{_num(pad)}" y1="{_num(size - pad)}" x2="{_num(size - pad)}" '
        f'y2="{_num(size - pad)}" stroke="{c}" stroke-width="1"/>',
        f'<line x1="{_num(pad)}" y1="{_num(pad)}" x2="{_num(pad)}" y2="{_num(size - pad)}" '
        f'stroke="{c}" stroke-width="1"/>',
        f'<text x="{_num(size / 2)}" y="{_num(size - pad / 4)}" text-anchor="middle" '
        f'font-size="14" fill="{c}">z_1</text>',
        f'<text x="{_num(pad / 3)}" y="{_num(size / 2)}" text-anchor="middle" font-size="14" '
        f'fill="{c}" transform="rotate(-90 {_num(pad / 3)} {_num(size / 2)})">z_2</text>',
    ]


def _colorbar(size: float, pad: float, lo: float, hi: float) -> list[str]:
    x0, w = size - pad * 0.6, pad * 0.25
    y0, y1 = pad, size - pad
    stops = "".join(
        f'<stop offset="{t:g}" stop-color="{gradient_color(t)}"/>' for t, _ in style.GRADIENT
    )
    return [
        '<defs><linearGradient id="cbar" x1="0" y1="1" x2="0" y2="0">' + stops
        + "</linearGradient></defs>",
        f'<rect x="{_num(x0)}" y="{_num(y0)}" width="{_num(w)}" height="{_num(y1 - y0)}" '
        f'fill="url(#cbar)" stroke="{style.AXIS_COLOR}" stroke-width="0.5"/>',
        f'<text x="{_num(x0 + w / 2)}" y="{_num(y0 - 4)}" text-anchor="middle" '
        f'font-size="10">{escape(fmt(hi))}</text>',
        f'<text x="{_num(x0 + w / 2)}" y="{_num(y1 + 12)}" text-anchor="middle" '
        f'font-size="10">{escape(fmt(lo))}</text>',
    ]


def _write_text(path: Path, text: str) -> Path:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(str(path), exc) from exc
    return Path(path)


def svg_scatter(
    z,
    color_values=None,
    boundary: Optional[Polygon] = None,
    footprints: Sequence[tuple[str, Sequence[Polygon]]] = (),
    point_colors: Optional[Sequence[str]] = None,
    title: str = "",
) -> str:
    """SVG text of a scatter of ``z``; see :func:`render_scatter`."""
    z = np.asarray(z, dtype=float)
    n = len(z)
    size = style.VIEWPORT
    vp = Viewport(z, size)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:g}" height="{size:g}" '
        f'viewBox="0 0 {size:g} {size:g}">',
        f'<rect x="0" y="0" width="{size:g}" height="{size:g}" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{_num(size / 2)}" y="{_num(vp.pad * 0.6)}" text-anchor="middle" '
            f'font-size="16">{escape(title)}</text>'
        )
    for k, (name, polys) in enumerate(footprints):
        col = style.ALGORITHM_COLORS[k % len(style.ALGORITHM_COLORS)]
        for poly in polys:
            out.append(
                f'<path d="{_path_data(poly, vp)}" fill="{col}" fill-opacity="{style.FOOTPRINT_OPACITY}" '
                f'fill-rule="evenodd" stroke="none"><title>{escape(name)}</title></path>'
            )
    if boundary is not None:
        out.append(
            f'<path d="{_path_data(boundary, vp)}" fill="none" stroke="{style.BOUNDARY_COLOR}" '
            f'stroke-width="1.5" stroke-dasharray="6,3"/>'
        )
    out += _axes(size, vp.pad)

    if point_colors is None:
        vals = np.zeros(n) if color_values is None else np.asarray(color_values, dtype=float)
        if len(vals) != n:
            raise ValueError(f"{len(vals)} colour values for {n} points")
        fills = [gradient_color(t) for t in color_positions(vals)]
    else:
        fills = list(point_colors)
    px = vp(z) if n else np.zeros((0, 2))
    for (x, y), fill in zip(px, fills):
        out.append(
            f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{style.POINT_RADIUS:g}" fill="{fill}" '
            'stroke="#000000" stroke-width="0.3"/>'
        )
    if point_colors is None and color_values is not None:
        finite = np.asarray(color_values, dtype=float)
        finite = finite[np.isfinite(finite)]
        lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 0.0)
        out += _colorbar(size, vp.pad, lo, hi)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_scatter(
    z, color_values, boundary: Optional[Polygon] = None, footprints=None, out_path="scatter.svg",
    title: str = "",
) -> Path:
    """Scatter of ``z`` coloured by ``color_values`` on the fixed gradient.

    ``footprints`` is an optional sequence of ``(label, polygons)`` pairs drawn
    as translucent fills; ``boundary`` is drawn as an outline.
    """
    text = svg_scatter(z, color_values, boundary, footprints or (), title=title)
    return _write_text(Path(out_path), text)


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


def write_plots(model, out_dir) -> list[Path]:
    """Feature-gradient, footprint and source plots for ``model``."""
    out = Path(out_dir)
    prep, prelim, sifted, projection = model.data, model.prelim, model.sifted, model.pilot
    if projection is None or prep is None or prelim is None or sifted is None:
        log.warning("no projection in model; plots skipped")
        return []
    z = np.asarray(projection.z)
    boundary = model.cloister.boundary if model.cloister is not None else None
    written = []
    x_norm = np.asarray(prelim.x_norm)
    for j, name in zip(sifted.selected_feature_indices, sifted.selected_feature_names):
        written.append(
            render_scatter(z, x_norm[:, j], boundary, None, out / f"space_feature_{_safe(name)}.svg",
                           title=name)
        )
    if model.trace is not None:
        fps = [
            (fp.algorithm, fp.polygons)
            for fp in model.trace.footprints
            if fp.kind == FootprintKind.GOOD and fp.algorithm in prep.metadata_clean.algorithm_names
        ]
        best_alg = np.asarray(prelim.p_best, dtype=float)
        written.append(
            render_scatter(z, best_alg, boundary, fps, out / "space_footprints.svg",
                           title="good footprints")
        )
    else:
        log.warning("no footprints in model; space_footprints.svg skipped")
    sources = prep.metadata_clean.source_labels
    if sources is not None:
        names = sorted(set(sources))
        lut = {s: style.SOURCE_COLORS[k % len(style.SOURCE_COLORS)] for k, s in enumerate(names)}
        text = svg_scatter(z, None, boundary, point_colors=[lut[s] for s in sources], title="sources")
        written.append(_write_text(out / "space_sources.svg", text))
    return written


def write_report(model, out_dir, plots: bool = True, tables: bool = True) -> list[Path]:
    paths = write_tables(model, out_dir) if tables else []
    if plots:
        paths += write_plots(model, out_dir)
    return sorted(paths, key=os.fspath)
