"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations

from typing import Any


class IsaError(Exception):
    """Base class for anticipated (user-facing) failures."""


class InputError(IsaError):
    """Raised for malformed metadata or options files."""


class MissingInstancesColumn(InputError):
    def __init__(self) -> None:
        super().__init__("metadata has no 'Instances' column")


class NoFeatureColumns(InputError):
    def __init__(self) -> None:
        super().__init__("metadata has no 'feature_*' columns")


class NoAlgorithmColumns(InputError):
    def __init__(self) -> None:
        super().__init__("metadata has no 'algo_*' columns")


class NonNumericCell(InputError):
    def __init__(self, row: int, col: str, value: str) -> None:
        self.row, self.col, self.value = row, col, value
        super().__init__(f"non-numeric cell {value!r} at row {row}, column {col!r}")


class MissingPerformanceValue(InputError):
    def __init__(self, row: int, col: str) -> None:
        self.row, self.col = row, col
        super().__init__(f"missing performance value at row {row}, column {col!r}")


class RaggedRow(InputError):
    def __init__(self, row: int, got: int, expected: int) -> None:
        self.row = row
        super().__init__(f"row {row} has {got} cells, header has {expected}")


class InvalidMetadata(InputError):
    def __init__(self, diagnostics: list[str]) -> None:
        self.diagnostics = diagnostics
        super().__init__("invalid metadata: " + "; ".join(diagnostics))


class MalformedJson(InputError):
    pass


class OptionOutOfRange(InputError):
    def __init__(self, key: str, value: Any) -> None:
        self.key, self.value = key, value
        super().__init__(f"option {key} = {value!r} is out of range")


class WrongType(InputError):
    def __init__(self, key: str, expected: str) -> None:
        self.key = key
        super().__init__(f"option {key} must be {expected}")


class PipelineError(IsaError):
    pass


class CyclicDependency(PipelineError):
    def __init__(self, cycle: list[str]) -> None:
        self.cycle = cycle
        super().__init__("cyclic stage dependency: " + " -> ".join(cycle))


class MissingProducer(PipelineError):
    def __init__(self, artifact: str, consumer: str) -> None:
        self.artifact, self.consumer = artifact, consumer
        super().__init__(f"no stage produces {artifact!r} required by {consumer!r}")


class StageFailed(PipelineError):
    def __init__(self, stage: str, cause: BaseException, partial_model: Any) -> None:
        self.stage, self.cause, self.partial_model = stage, cause, partial_model
        super().__init__(f"stage {stage} failed: {type(cause).__name__}: {cause}")


class StageError(IsaError):
    """Numerical or structural failure inside a stage."""


class TooFewInstancesAfterCleaning(StageError):
    pass


class TooFewFeaturesAfterCleaning(StageError):
    pass


class DegenerateColumn(StageError):
    pass


class DegenerateClustering(StageError):
    pass


class DimensionMismatch(StageError):
    pass


class OptimizationDiverged(StageError):
    pass


class EigenFailure(StageError):
    pass


class TooManyFeatures(StageError):
    pass


class DegenerateBoundary(StageError):
    pass


class SingleClassInput(StageError):
    pass


class DegenerateProjection(StageError):
    pass


class GeometryError(IsaError):
    pass


class Degenerate(GeometryError):
    pass


class InvalidPolygon(GeometryError):
    pass


class IoFailure(IsaError):
    def __init__(self, path: Any, cause: BaseException | None = None) -> None:
        self.path = path
        super().__init__(f"cannot access {path}: {cause}")
