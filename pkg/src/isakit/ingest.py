"""Readers for ``metadata.csv`` and ``options.json``."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
import re
import typing
from pathlib import Path
from typing import Any, Union

import numpy as np

from isakit.datamodel import IsaOptions, Metadata
from isakit.errors import (
    IoFailure,
    MalformedJson,
    MissingInstancesColumn,
    MissingPerformanceValue,
    NoAlgorithmColumns,
    NoFeatureColumns,
    NonNumericCell,
    RaggedRow,
    WrongType,
)

log = logging.getLogger(__name__)

FEATURE_PREFIX = "feature_"
ALGO_PREFIX = "algo_"
_MISSING_TOKENS = {"", "nan", "na", "null"}


@dataclasses.dataclass(frozen=True)
class RawCsvTable:
    header: list[str]
    rows: list[list[str]]


def read_csv_table(text: str) -> RawCsvTable:
    """Split CSV text into header and rows, rejecting ragged rows."""
    if text.startswith("\ufeff"):
        text = text[1:]
    reader = csv.reader(io.StringIO(text, newline=""))
    records = [r for r in reader if r]
    if not records:
        raise MissingInstancesColumn()
    header = [h.strip() for h in records[0]]
    rows = records[1:]
    for k, row in enumerate(rows):
        if len(row) != len(header):
            raise RaggedRow(k, len(row), len(header))
    return RawCsvTable(header, rows)


def _parse_float(cell: str, row: int, col: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise NonNumericCell(row, col, cell) from None


def parse_metadata_csv(text: str) -> Metadata:
    """Build Metadata from the text of a ``metadata.csv`` file.

    Columns are classified by name: ``Instances`` (any case), optional
    ``Source``, ``feature_<name>`` and ``algo_<name>``; other columns are
    ignored with a warning.
    """
    table = read_csv_table(text)
    lower = [h.lower() for h in table.header]
    if "instances" not in lower:
        raise MissingInstancesColumn()
    inst_col = lower.index("instances")
    src_col = lower.index("source") if "source" in lower else None
    feat_cols = [k for k, h in enumerate(lower) if h.startswith(FEATURE_PREFIX)]
    algo_cols = [k for k, h in enumerate(lower) if h.startswith(ALGO_PREFIX)]
    if not feat_cols:
        raise NoFeatureColumns()
    if not algo_cols:
        raise NoAlgorithmColumns()
    used = {inst_col, *feat_cols, *algo_cols} | ({src_col} if src_col is not None else set())
    for k, h in enumerate(table.header):
        if k not in used:
            log.warning("ignoring unrecognised metadata column %r", h)

    n = len(table.rows)
    x = np.empty((n, len(feat_cols)))
    y = np.empty((n, len(algo_cols)))
    missing = np.zeros((n, len(feat_cols)), dtype=bool)
    for r, row in enumerate(table.rows):
        for c, k in enumerate(feat_cols):
            cell = row[k].strip()
            if cell.lower() in _MISSING_TOKENS:
                x[r, c] = np.nan
                missing[r, c] = True
            else:
                x[r, c] = _parse_float(cell, r, table.header[k])
                if math.isnan(x[r, c]):
                    missing[r, c] = True
        for c, k in enumerate(algo_cols):
            cell = row[k].strip()
            if cell.lower() in _MISSING_TOKENS:
                raise MissingPerformanceValue(r, table.header[k])
            v = _parse_float(cell, r, table.header[k])
            if not math.isfinite(v):
                raise NonNumericCell(r, table.header[k], cell)
            y[r, c] = v

    return Metadata(
        instance_ids=tuple(row[inst_col].strip() for row in table.rows),
        feature_names=tuple(table.header[k][len(FEATURE_PREFIX):] for k in feat_cols),
        algorithm_names=tuple(table.header[k][len(ALGO_PREFIX):] for k in algo_cols),
        x=x,
        y=y,
        missing_mask=missing,
        source_labels=(
            tuple(row[src_col].strip() for row in table.rows) if src_col is not None else None
        ),
    )


def _read(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as exc:
        raise IoFailure(str(path), exc) from exc


def from_csv_file(path: Union[str, Path]) -> Metadata:
    return parse_metadata_csv(_read(path))


# ----------------------------------------------------------------- options


def _snake(key: str) -> str:
    """``betaThreshold`` / ``MaxPerf`` / ``beta-threshold`` -> snake case."""
    key = re.sub(r"(?<=[a-z0-9])([A-Z])", r"_\1", key.strip())
    return key.replace("-", "_").lower()


def _coerce(key: str, value: Any, hint: Any) -> Any:
    origin = typing.get_origin(hint)
    if origin is Union:
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        if value is None:
            return None
        return _coerce(key, value, args[0])
    if hint is bool:
        if not isinstance(value, bool):
            raise WrongType(key, "a boolean")
        return value
    if hint is int:
        if isinstance(value, bool) or not (
            isinstance(value, int) or (isinstance(value, float) and value.is_integer())
        ):
            raise WrongType(key, "an integer")
        return int(value)
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise WrongType(key, "a number")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise WrongType(key, "a string")
        return value
    return value


def _build_section(cls, section: str, raw: Any):
    if not isinstance(raw, dict):
        raise WrongType(section, "an object")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in raw.items():
        name = _snake(key)
        if name not in names:
            log.warning("unknown option %s.%s ignored", section, key)
            continue
        kwargs[name] = _coerce(f"{section}.{name}", value, hints[name])
    return cls(**kwargs)


def parse_options(raw: Any) -> IsaOptions:
    """Build IsaOptions from an already-decoded JSON value."""
    if not isinstance(raw, dict):
        raise WrongType("<root>", "an object")
    hints = typing.get_type_hints(IsaOptions)
    sections = {f.name for f in dataclasses.fields(IsaOptions)}
    kwargs = {}
    for key, value in raw.items():
        name = _snake(key)
        if name not in sections:
            log.warning("unknown option section %r ignored", key)
            continue
        kwargs[name] = _build_section(hints[name], name, value)
    return IsaOptions(**kwargs)


def parse_options_json(text: str) -> IsaOptions:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"options are not valid JSON: {exc}") from exc
    return parse_options(raw)


def from_json_file(path: Union[str, Path]) -> IsaOptions:
    return parse_options_json(_read(path))
