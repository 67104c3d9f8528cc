"""Fixed colours for the SVG plots, kept in one place so goldens stay stable."""

GRADIENT = ((0.0, (49, 54, 149)), (0.5, (255, 255, 191)), (1.0, (165, 0, 38)))

ALGORITHM_COLORS = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

SOURCE_COLORS = ALGORITHM_COLORS

BOUNDARY_COLOR = "#000000"
AXIS_COLOR = "#333333"
FOOTPRINT_OPACITY = 0.4
POINT_RADIUS = 4.0
VIEWPORT = 800.0
MARGIN = 0.05
