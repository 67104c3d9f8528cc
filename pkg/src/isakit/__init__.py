"""Instance space analysis: projections, algorithm selection and footprints."""

__version__ = "0.1.0"
