"""Preprocessing: drop sparse or constant columns, sparse rows, impute medians."""

from __future__ import annotations

import numpy as np

from isakit.datamodel import Dropped, IsaOptions, Metadata, PrepOut, validate_metadata
from isakit.errors import (
    InvalidMetadata,
    TooFewFeaturesAfterCleaning,
    TooFewInstancesAfterCleaning,
)

MAX_MISSING_FRACTION = 0.2
MIN_INSTANCES = 3
MIN_FEATURES = 2


def _zero_variance(col: np.ndarray) -> bool:
    observed = col[~np.isnan(col)]
    if observed.size == 0:
        return True
    return bool(np.all(observed == observed[0]))


def preprocess(m: Metadata, o: IsaOptions | None = None) -> PrepOut:
    """Return a dense copy of ``m`` with unusable rows/columns removed.

    Columns with more than 20% missing cells or no variation among observed
    values are dropped first, then instances missing more than 20% of the
    surviving features; the remaining gaps take the column median.
    """
    diags = validate_metadata(m)
    if diags:
        raise InvalidMetadata(diags)

    x = np.array(m.x, dtype=np.float64)
    missing = np.array(m.missing_mask, dtype=bool) | np.isnan(x)
    n, f = x.shape

    dropped_features: list[Dropped] = []
    keep_cols = []
    for j in range(f):
        frac = missing[:, j].mean()
        if frac > MAX_MISSING_FRACTION:
            dropped_features.append(Dropped(m.feature_names[j], f"missing fraction {frac:.3g}"))
        elif _zero_variance(np.where(missing[:, j], np.nan, x[:, j])):
            dropped_features.append(Dropped(m.feature_names[j], "zero-variance"))
        else:
            keep_cols.append(j)
    if len(keep_cols) < MIN_FEATURES:
        raise TooFewFeaturesAfterCleaning(
            f"{len(keep_cols)} features survive cleaning, need {MIN_FEATURES}"
        )
    x, missing = x[:, keep_cols], missing[:, keep_cols]

    row_frac = missing.mean(axis=1)
    keep_rows = np.flatnonzero(row_frac <= MAX_MISSING_FRACTION)
    dropped_instances = [
        Dropped(m.instance_ids[i], f"missing fraction {row_frac[i]:.3g}")
        for i in range(n)
        if row_frac[i] > MAX_MISSING_FRACTION
    ]
    if len(keep_rows) < MIN_INSTANCES:
        raise TooFewInstancesAfterCleaning(
            f"{len(keep_rows)} instances survive cleaning, need {MIN_INSTANCES}"
        )
    x, missing = x[keep_rows], missing[keep_rows]

    imputed = 0
    for j in range(x.shape[1]):
        gaps = missing[:, j]
        if gaps.any():
            x[gaps, j] = np.median(x[~gaps, j])
            imputed += int(gaps.sum())

    clean = Metadata(
        instance_ids=tuple(m.instance_ids[i] for i in keep_rows),
        feature_names=tuple(m.feature_names[j] for j in keep_cols),
        algorithm_names=m.algorithm_names,
        x=x,
        y=np.asarray(m.y)[keep_rows],
        missing_mask=np.zeros_like(x, dtype=bool),
        source_labels=(
            tuple(m.source_labels[i] for i in keep_rows) if m.source_labels is not None else None
        ),
    )
    return PrepOut(clean, tuple(dropped_instances), tuple(dropped_features), imputed)
