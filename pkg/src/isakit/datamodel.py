"""Shared domain types: metadata, options and the stage artifacts.

Every artifact is a frozen dataclass whose array fields are stored as
read-only copies, so stages can hand them around without defensive copying.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from isakit.errors import OptionOutOfRange
from isakit.geometry import Polygon
from isakit.svm import PlattScaler, SvmModel

MIN_INSTANCES = 3
MIN_FEATURES = 2


def _readonly(value: np.ndarray) -> np.ndarray:
    arr = np.array(value, copy=True)
    arr.setflags(write=False)
    return arr


class Artifact:
    """Mixin freezing ndarray fields and turning list fields into tuples."""

    def __post_init__(self) -> None:
        for f in dataclasses.fields(self):  # type: ignore[arg-type]
            value = getattr(self, f.name)
            if isinstance(value, np.ndarray):
                object.__setattr__(self, f.name, _readonly(value))
            elif isinstance(value, list):
                object.__setattr__(self, f.name, tuple(value))


# ---------------------------------------------------------------- metadata


@dataclass(frozen=True)
class Metadata(Artifact):
    """Instances with their feature values and algorithm performances.

    ``x`` is n-by-f, ``y`` is n-by-a, both row-major by instance.  Cells of
    ``x`` absent from the input are NaN and flagged in ``missing_mask``.
    """

    instance_ids: tuple[str, ...]
    feature_names: tuple[str, ...]
    algorithm_names: tuple[str, ...]
    x: NDArray[np.float64]
    y: NDArray[np.float64]
    missing_mask: NDArray[np.bool_]
    source_labels: Optional[tuple[str, ...]] = None

    @property
    def n_instances(self) -> int:
        return len(self.instance_ids)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def n_algorithms(self) -> int:
        return len(self.algorithm_names)


def validate_metadata(m: Metadata) -> list[str]:
    """Return one human-readable diagnostic per violated Metadata invariant."""
    diags: list[str] = []
    n = len(m.instance_ids)
    if n < MIN_INSTANCES:
        diags.append(f"too few instances: {n} < {MIN_INSTANCES}")
    if len(m.feature_names) < MIN_FEATURES:
        diags.append(f"too few features: {len(m.feature_names)} < {MIN_FEATURES}")
    if len(m.algorithm_names) < 1:
        diags.append("no algorithms")

    seen: dict[str, int] = {}
    for row, iid in enumerate(m.instance_ids):
        if iid in seen:
            diags.append(f"duplicate instance id {iid!r} at rows {seen[iid]} and {row}")
        else:
            seen[iid] = row

    if m.x.ndim != 2 or m.x.shape != (n, len(m.feature_names)):
        diags.append(f"x has shape {m.x.shape}, expected ({n}, {len(m.feature_names)})")
    if m.y.ndim != 2 or m.y.shape != (n, len(m.algorithm_names)):
        diags.append(f"y has shape {m.y.shape}, expected ({n}, {len(m.algorithm_names)})")
    if m.missing_mask.shape != m.x.shape:
        diags.append(f"missing_mask has shape {m.missing_mask.shape}, expected {m.x.shape}")
    if m.source_labels is not None and len(m.source_labels) != n:
        diags.append(f"source_labels has {len(m.source_labels)} entries, expected {n}")

    if m.y.shape == (n, len(m.algorithm_names)):
        bad = np.argwhere(~np.isfinite(m.y))
        for row, col in bad[:20]:
            diags.append(
                f"missing performance value at row {row}, algorithm {m.algorithm_names[col]!r}"
            )
    if m.missing_mask.shape == m.x.shape:
        unflagged = np.isnan(m.x) & ~m.missing_mask
        for row, col in np.argwhere(unflagged)[:20]:
            diags.append(f"NaN feature value not flagged missing at row {row}, column {col}")
    return diags


# ----------------------------------------------------------------- options


def _check(key: str, value, ok: bool) -> None:
    if not ok:
        raise OptionOutOfRange(key, value)


@dataclass(frozen=True)
class PerfOptions:
    max_perf: bool = False
    abs_perf: bool = False
    epsilon: float = 0.05
    beta_threshold: float = 0.55

    def __post_init__(self) -> None:
        _check("perf.epsilon", self.epsilon, self.epsilon > 0)
        _check("perf.beta_threshold", self.beta_threshold, 0 < self.beta_threshold <= 1)


@dataclass(frozen=True)
class BoundOptions:
    enabled: bool = True
    iqr_multiplier: float = 5.0

    def __post_init__(self) -> None:
        _check("bound.iqr_multiplier", self.iqr_multiplier, self.iqr_multiplier > 0)


@dataclass(frozen=True)
class NormOptions:
    enabled: bool = True


@dataclass(frozen=True)
class SiftedOptions:
    rho: float = 0.1
    k: int = 10
    max_tries: int = 30
    ga_population: int = 50
    ga_generations: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        _check("sifted.rho", self.rho, 0 <= self.rho <= 1)
        _check("sifted.k", self.k, self.k >= 2)
        _check("sifted.max_tries", self.max_tries, self.max_tries >= 1)
        _check("sifted.ga_population", self.ga_population, self.ga_population >= 2)
        _check("sifted.ga_generations", self.ga_generations, self.ga_generations >= 1)


@dataclass(frozen=True)
class PilotOptions:
    analytic: bool = False
    n_tries: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        _check("pilot.n_tries", self.n_tries, self.n_tries >= 1)


@dataclass(frozen=True)
class CloisterOptions:
    c_thres: float = 0.7
    p_val: float = 0.05

    def __post_init__(self) -> None:
        _check("cloister.c_thres", self.c_thres, 0 <= self.c_thres <= 1)
        _check("cloister.p_val", self.p_val, 0 < self.p_val < 1)


@dataclass(frozen=True)
class PythiaOptions:
    cv_folds: int = 5
    use_poly_kernel: bool = False
    grid_resolution: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        _check("pythia.cv_folds", self.cv_folds, self.cv_folds >= 2)
        _check("pythia.grid_resolution", self.grid_resolution, self.grid_resolution >= 1)


@dataclass(frozen=True)
class TraceOptions:
    """Footprint options; ``eps``/``alpha`` of None select the data-driven defaults."""

    purity_pi: float = 0.55
    use_sim: bool = False
    min_pts: int = 5
    eps: Optional[float] = None
    alpha: Optional[float] = None

    def __post_init__(self) -> None:
        _check("trace.purity_pi", self.purity_pi, 0 < self.purity_pi < 1)
        _check("trace.min_pts", self.min_pts, self.min_pts >= 1)
        _check("trace.eps", self.eps, self.eps is None or self.eps > 0)
        _check("trace.alpha", self.alpha, self.alpha is None or self.alpha > 0)


@dataclass(frozen=True)
class ParallelOptions:
    enabled: bool = False
    n_workers: int = 1

    def __post_init__(self) -> None:
        _check("parallel.n_workers", self.n_workers, self.n_workers >= 1)

    @property
    def workers(self) -> int:
        return self.n_workers if self.enabled else 1


@dataclass(frozen=True)
class OutputOptions:
    out_dir: str = "output"
    emit_plots: bool = True
    emit_csv: bool = True


@dataclass(frozen=True)
class IsaOptions:
    perf: PerfOptions = field(default_factory=PerfOptions)
    bound: BoundOptions = field(default_factory=BoundOptions)
    norm: NormOptions = field(default_factory=NormOptions)
    sifted: SiftedOptions = field(default_factory=SiftedOptions)
    pilot: PilotOptions = field(default_factory=PilotOptions)
    cloister: CloisterOptions = field(default_factory=CloisterOptions)
    pythia: PythiaOptions = field(default_factory=PythiaOptions)
    trace: TraceOptions = field(default_factory=TraceOptions)
    parallel: ParallelOptions = field(default_factory=ParallelOptions)
    outputs: OutputOptions = field(default_factory=OutputOptions)

    def with_seed(self, seed: int) -> "IsaOptions":
        """Copy with every stochastic stage seeded from ``seed``."""
        return dataclasses.replace(
            self,
            sifted=dataclasses.replace(self.sifted, seed=seed),
            pilot=dataclasses.replace(self.pilot, seed=seed),
            pythia=dataclasses.replace(self.pythia, seed=seed),
        )


# --------------------------------------------------------------- artifacts


@dataclass(frozen=True)
class Dropped(Artifact):
    name: str
    reason: str


@dataclass(frozen=True)
class PrepOut(Artifact):
    metadata_clean: Metadata
    dropped_instances: tuple[Dropped, ...]
    dropped_features: tuple[Dropped, ...]
    imputed_count: int


@dataclass(frozen=True)
class NormParams(Artifact):
    """Per-column transform: x -> ((x + shift) ** lam - 1) / lam -> z-score."""

    shift: float
    box_cox_lambda: float
    mean: float
    stddev: float


@dataclass(frozen=True)
class PrelimOut(Artifact):
    y_bin: NDArray[np.bool_]
    y_best: NDArray[np.float64]
    p_best: NDArray[np.int64]
    best_ties: NDArray[np.int64]
    beta_easy: NDArray[np.bool_]
    x_bounded: NDArray[np.float64]
    lower_bounds: NDArray[np.float64]
    upper_bounds: NDArray[np.float64]
    x_norm: NDArray[np.float64]
    norm_params: tuple[NormParams, ...]
    y_norm: NDArray[np.float64]
    y_norm_params: tuple[NormParams, ...]


@dataclass(frozen=True)
class SiftedOut(Artifact):
    selected_feature_indices: NDArray[np.int64]
    selected_feature_names: tuple[str, ...]
    feature_algorithm_corr: NDArray[np.float64]
    screened_feature_indices: NDArray[np.int64]
    cluster_assignment: NDArray[np.int64]
    selection_score: float


class ProjectionMethod(str, Enum):
    ANALYTIC = "analytic"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class ProjectionModel(Artifact):
    a: NDArray[np.float64]
    b: NDArray[np.float64]
    c: NDArray[np.float64]
    z: NDArray[np.float64]
    error: float
    method: ProjectionMethod


@dataclass(frozen=True)
class CloisterOut(Artifact):
    """Estimated boundary; ``boundary`` is None when it is degenerate."""

    boundary: Optional[Polygon]
    corners_total: int
    corners_kept: int
    warning: str = ""


class FootprintKind(str, Enum):
    GOOD = "good"
    BEST = "best"
    BETA = "beta"


@dataclass(frozen=True)
class Footprint(Artifact):
    algorithm: str
    kind: FootprintKind
    polygons: tuple[Polygon, ...]
    area: float
    density: float
    purity: float
    area_norm: float = 0.0
    density_norm: float = 0.0


@dataclass(frozen=True)
class AlgorithmSummary(Artifact):
    name: str
    avg_perf: float
    std_perf: float
    frac_good: float
    avg_perf_selected: float
    std_perf_selected: float
    cv_accuracy: float
    precision: float
    recall: float
    cost: float
    gamma: float


@dataclass(frozen=True)
class SelectorSummary(Artifact):
    algorithms: tuple[AlgorithmSummary, ...]
    oracle: AlgorithmSummary
    selector: AlgorithmSummary


@dataclass(frozen=True)
class AlgorithmModel(Artifact):
    """Trained goodness predictor for one algorithm.

    ``model`` is None for the constant classifier used on single-class labels;
    ``constant_label`` then holds the predicted class.
    """

    model: Optional[SvmModel]
    platt: PlattScaler
    cv_accuracy: float
    precision: float
    recall: float
    cost: float
    gamma: float
    constant_label: int = 0


@dataclass(frozen=True)
class PythiaOut(Artifact):
    models: tuple[AlgorithmModel, ...]
    probabilities: NDArray[np.float64]
    predicted_good: NDArray[np.bool_]
    selection: NDArray[np.int64]
    summary: SelectorSummary
    coord_mean: NDArray[np.float64]
    coord_std: NDArray[np.float64]


@dataclass(frozen=True)
class FootprintSummaryRow(Artifact):
    algorithm: str
    area_good_norm: float
    density_good_norm: float
    purity_good: float
    area_best_norm: float
    density_best_norm: float
    purity_best: float


@dataclass(frozen=True)
class TraceOut(Artifact):
    footprints: tuple[Footprint, ...]
    whole_space_area: float
    whole_space_density: float
    summary: tuple[FootprintSummaryRow, ...]

    def footprint(self, algorithm: str, kind: FootprintKind | str) -> Footprint:
        kind = FootprintKind(kind)
        for fp in self.footprints:
            if fp.algorithm == algorithm and fp.kind is kind:
                return fp
        raise KeyError((algorithm, kind.value))
