"""Stage graph: declarations, dependency ordering and sequential execution."""

from __future__ import annotations

import heapq
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

from isakit.datamodel import IsaOptions, Metadata
from isakit.errors import CyclicDependency, IsaError, MissingProducer, StageFailed
from isakit.stages.cloister import run_cloister
from isakit.stages.pilot import run_pilot
from isakit.stages.prelim import run_prelim
from isakit.stages.prep import preprocess
from isakit.stages.pythia import run_pythia
from isakit.stages.sifted import run_sifted
from isakit.stages.trace import run_trace

log = logging.getLogger("isakit.pipeline")

CANONICAL_ORDER = ("preprocessing", "prelim", "sifted", "pilot", "cloister", "pythia", "trace")

# artifact kinds
METADATA = "metadata"
PREPROCESSED = "preprocessed"
LABELS = "prelim"
SELECTED = "selected-features"
PROJECTION = "projection"
BOUNDARY = "boundary"
SELECTION = "selection"
FOOTPRINTS = "footprints"

EXTERNAL = frozenset({METADATA})


@dataclass(frozen=True)
class StageSpec:
    name: str
    inputs: frozenset[str]
    outputs: frozenset[str]
    run: Callable[[Mapping[str, Any], IsaOptions], Any] = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.outputs:
            raise ValueError(f"stage {self.name} declares no outputs")
        if self.inputs & self.outputs:
            raise ValueError(f"stage {self.name} consumes its own output")


def _spec(name, inputs, output, fn) -> StageSpec:
    return StageSpec(name, frozenset(inputs), frozenset({output}), fn)


PreprocessingStage = _spec(
    "preprocessing", {METADATA}, PREPROCESSED, lambda a, o: preprocess(a[METADATA], o)
)
PrelimStage = _spec("prelim", {PREPROCESSED}, LABELS, lambda a, o: run_prelim(a[PREPROCESSED], o))
SiftedStage = _spec(
    "sifted", {LABELS}, SELECTED, lambda a, o: run_sifted(a[PREPROCESSED], a[LABELS], o)
)
PilotStage = _spec(
    "pilot", {SELECTED}, PROJECTION, lambda a, o: run_pilot(a[LABELS], a[SELECTED], o)
)
CloisterStage = _spec(
    "cloister",
    {SELECTED, PROJECTION},
    BOUNDARY,
    lambda a, o: run_cloister(a[LABELS], a[SELECTED], a[PROJECTION], o),
)
PythiaStage = _spec(
    "pythia",
    {PROJECTION, LABELS},
    SELECTION,
    lambda a, o: run_pythia(a[PREPROCESSED], a[LABELS], a[PROJECTION], o),
)
TraceStage = _spec(
    "trace",
    {PROJECTION, LABELS, SELECTION},
    FOOTPRINTS,
    lambda a, o: run_trace(a[PREPROCESSED], a[LABELS], a[PROJECTION], a[SELECTION], o),
)

ALL_STAGES = (
    PreprocessingStage, PrelimStage, SiftedStage, PilotStage, CloisterStage, PythiaStage, TraceStage,
)
STAGES_BY_NAME = {s.name: s for s in ALL_STAGES}


def _rank(name: str) -> int:
    return CANONICAL_ORDER.index(name) if name in CANONICAL_ORDER else len(CANONICAL_ORDER)


def _find_cycle(specs: Sequence[StageSpec], producer: Mapping[str, str]) -> list[str]:
    deps = {
        s.name: sorted({producer[i] for i in s.inputs if i in producer}, key=_rank) for s in specs
    }
    state: dict[str, int] = {}
    path: list[str] = []

    def visit(u: str) -> Optional[list[str]]:
        state[u] = 1
        path.append(u)
        for v in deps[u]:
            if state.get(v) == 1:
                return path[path.index(v):] + [v]
            if v not in state:
                found = visit(v)
                if found:
                    return found
        path.pop()
        state[u] = 2
        return None

    for s in sorted(specs, key=lambda s: _rank(s.name)):
        if s.name not in state:
            found = visit(s.name)
            if found:
                return found
    return []


def build_order(stages: Iterable[StageSpec]) -> list[str]:
    """Topological order of the stages, ties broken by the canonical sequence."""
    specs = list(stages)
    producer: dict[str, str] = {}
    for s in specs:
        for out in s.outputs:
            producer[out] = s.name
    for s in sorted(specs, key=lambda s: _rank(s.name)):
        for art in sorted(s.inputs):
            if art not in producer and art not in EXTERNAL:
                raise MissingProducer(art, s.name)

    by_name = {s.name: s for s in specs}
    indegree = {s.name: 0 for s in specs}
    consumers: dict[str, list[str]] = {s.name: [] for s in specs}
    for s in specs:
        for dep in {producer[i] for i in s.inputs if i in producer}:
            indegree[s.name] += 1
            consumers[dep].append(s.name)
    ready = [(_rank(n), n) for n, d in indegree.items() if d == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        _, name = heapq.heappop(ready)
        order.append(name)
        for c in consumers[name]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(ready, (_rank(c), c))
    if len(order) != len(by_name):
        raise CyclicDependency(_find_cycle(specs, producer))
    return order


@dataclass
class PipelineModel:
    """Artifacts of a run keyed by kind, plus the executed order and timings (s)."""

    artifacts: dict[str, Any] = field(default_factory=dict)
    stage_order: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def get(self, kind: str) -> Any:
        return self.artifacts.get(kind)

    @property
    def data(self):
        return self.artifacts.get(PREPROCESSED)

    @property
    def prelim(self):
        return self.artifacts.get(LABELS)

    @property
    def sifted(self):
        return self.artifacts.get(SELECTED)

    @property
    def pilot(self):
        return self.artifacts.get(PROJECTION)

    @property
    def cloister(self):
        return self.artifacts.get(BOUNDARY)

    @property
    def pythia(self):
        return self.artifacts.get(SELECTION)

    @property
    def trace(self):
        return self.artifacts.get(FOOTPRINTS)


def run(
    metadata: Metadata, options: IsaOptions, stages: Iterable[StageSpec] = ALL_STAGES
) -> PipelineModel:
    """Execute the stages in dependency order.

    A failing stage raises :class:`StageFailed` carrying the partial model.
    """
    specs = {s.name: s for s in stages}
    order = build_order(specs.values())
    model = PipelineModel(stage_order=list(order))
    available: dict[str, Any] = {METADATA: metadata}
    for name in order:
        spec = specs[name]
        log.info("stage=%s event=start elapsed_ms=0", name)
        t0 = time.perf_counter()
        try:
            out = spec.run(available, options)
        except (IsaError, ArithmeticError, ValueError, KeyError) as exc:
            elapsed = time.perf_counter() - t0
            model.timings[name] = elapsed
            log.error("stage=%s event=fail elapsed_ms=%d error=%s", name, elapsed * 1000,
                      type(exc).__name__)
            raise StageFailed(name, exc, model) from exc
        elapsed = time.perf_counter() - t0
        model.timings[name] = elapsed
        for kind in spec.outputs:
            available[kind] = out
            model.artifacts[kind] = out
        log.info("stage=%s event=end elapsed_ms=%d", name, round(elapsed * 1000))
    return model


def stages_from_names(names: Iterable[str]) -> list[StageSpec]:
    out = []
    for n in names:
        key = n.strip().lower()
        if key not in STAGES_BY_NAME:
            raise ValueError(f"unknown stage {n!r}; choose from {', '.join(CANONICAL_ORDER)}")
        out.append(STAGES_BY_NAME[key])
    return out


class InstanceSpace:
    """Binds metadata, options and a stage set; ``build()`` runs the pipeline."""

    def __init__(
        self,
        metadata: Metadata,
        options: IsaOptions,
        stages: Iterable[StageSpec] = ALL_STAGES,
    ) -> None:
        self.metadata = metadata
        self.options = options
        self.stages = list(stages)
        self.stage_order = build_order(self.stages)
        self.model: Optional[PipelineModel] = None

    def build(self) -> PipelineModel:
        self.model = run(self.metadata, self.options, self.stages)
        return self.model
