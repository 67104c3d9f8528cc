"""Lossless CSV form of stage artifacts.

Every leaf of an artifact becomes one row ``path,kind,type,shape,value``.
Floats are written with ``repr`` so reading them back is exact.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from enum import Enum
from typing import Any

import numpy as np

from isakit import datamodel, geometry, svm

HEADER = ("path", "kind", "type", "shape", "value")


def _registry() -> dict[str, type]:
    out: dict[str, type] = {}
    for mod in (datamodel, geometry, svm):
        for name, obj in vars(mod).items():
            if isinstance(obj, type) and getattr(obj, "__module__", "") == mod.__name__:
                if dataclasses.is_dataclass(obj) or issubclass(obj, Enum):
                    out[name] = obj
    return out


def _encode_array(a: np.ndarray) -> tuple[str, str]:
    kind = a.dtype.kind
    flat = a.ravel()
    if kind == "f":
        return "float", " ".join(repr(float(v)) for v in flat)
    if kind in "iu":
        return "int", " ".join(str(int(v)) for v in flat)
    if kind == "b":
        return "bool", "".join("1" if v else "0" for v in flat)
    if kind in "UO":
        return "str", json.dumps([str(v) for v in flat])
    raise TypeError(f"cannot serialize array of dtype {a.dtype}")


def _rows(obj: Any, path: str, out: list[tuple[str, ...]]) -> None:
    if obj is None:
        out.append((path, "none", "", "", ""))
    elif isinstance(obj, Enum):
        out.append((path, "enum", type(obj).__name__, "", str(obj.value)))
    elif isinstance(obj, (bool, np.bool_)):
        out.append((path, "bool", "", "", "1" if obj else "0"))
    elif isinstance(obj, (int, np.integer)):
        out.append((path, "int", "", "", str(int(obj))))
    elif isinstance(obj, (float, np.floating)):
        out.append((path, "float", "", "", repr(float(obj))))
    elif isinstance(obj, str):
        out.append((path, "str", "", "", obj))
    elif isinstance(obj, np.ndarray):
        dtype, text = _encode_array(obj)
        shape = "x".join(str(s) for s in obj.shape)
        out.append((path, "array", dtype, shape, text))
    elif dataclasses.is_dataclass(obj):
        out.append((path, "object", type(obj).__name__, "", ""))
        for f in dataclasses.fields(obj):
            if f.init:
                _rows(getattr(obj, f.name), f"{path}.{f.name}", out)
    elif isinstance(obj, (tuple, list)):
        out.append((path, "tuple", "", str(len(obj)), ""))
        for i, item in enumerate(obj):
            _rows(item, f"{path}[{i}]", out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} at {path}")


def to_csv(artifact: Any) -> str:
    """Serialize ``artifact`` (any package dataclass) to CSV text."""
    rows: list[tuple[str, ...]] = []
    _rows(artifact, "$", rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    w.writerows(rows)
    return buf.getvalue()


def _decode_array(dtype: str, shape: str, text: str) -> np.ndarray:
    dims = tuple(int(s) for s in shape.split("x")) if shape else ()
    if dtype == "float":
        vals = np.array([float(t) for t in text.split()], dtype=float)
    elif dtype == "int":
        vals = np.array([int(t) for t in text.split()], dtype=np.int64)
    elif dtype == "bool":
        vals = np.array([c == "1" for c in text], dtype=bool)
    else:
        vals = np.array(json.loads(text), dtype=str)
    return vals.reshape(dims)


def _build(rows: list[list[str]], pos: int, reg: dict[str, type]) -> tuple[Any, int]:
    path, kind, typ, shape, value = rows[pos]
    pos += 1
    if kind == "none":
        return None, pos
    if kind == "bool":
        return value == "1", pos
    if kind == "int":
        return int(value), pos
    if kind == "float":
        return float(value), pos
    if kind == "str":
        return value, pos
    if kind == "enum":
        return reg[typ](value), pos
    if kind == "array":
        return _decode_array(typ, shape, value), pos
    if kind == "tuple":
        items = []
        for _ in range(int(shape)):
            item, pos = _build(rows, pos, reg)
            items.append(item)
        return tuple(items), pos
    if kind == "object":
        cls = reg[typ]
        kwargs = {}
        for f in (f for f in dataclasses.fields(cls) if f.init):
            kwargs[f.name], pos = _build(rows, pos, reg)
        return cls(**kwargs), pos
    raise ValueError(f"unknown row kind {kind!r} at {path}")


def from_csv(text: str) -> Any:
    """Inverse of :func:`to_csv`."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != HEADER:
        raise ValueError("not an artifact CSV")
    obj, pos = _build(rows[1:], 0, _registry())
    if pos != len(rows) - 1:
        raise ValueError("trailing rows in artifact CSV")
    return obj


def numeric_leaves(obj: Any, path: str = "$") -> dict[str, np.ndarray]:
    """Flat map of every numeric field, for comparing artifacts."""
    rows: list[tuple[str, ...]] = []
    _rows(obj, path, rows)
    out = {}
    for p, kind, typ, shape, value in rows:
        if kind in ("int", "float", "bool"):
            out[p] = np.array(float(value) if kind == "float" else int(value), dtype=float)
        elif kind == "array" and typ != "str":
            out[p] = _decode_array(typ, shape, value).astype(float)
    return out
