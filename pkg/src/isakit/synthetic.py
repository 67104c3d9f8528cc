"""Seeded synthetic metadata with a latent 2-D structure, for demos and tests."""

from __future__ import annotations

import numpy as np

from isakit.datamodel import Metadata

N_NUISANCE = 2


def make_metadata(
    n: int = 200, f: int = 10, a: int = 3, seed: int = 0, n_sources: int = 3
) -> Metadata:
    """Instances driven by two latent factors.

    Features are noisy, partly skewed mixtures of the factors and of
    ``N_NUISANCE`` further factors that do not affect performance; each
    algorithm's cost is lowest in a different region of the latent plane.
    """
    rng = np.random.default_rng(seed)
    latent = rng.uniform(-1.0, 1.0, size=(n, 2 + N_NUISANCE))
    mix = rng.normal(size=(2 + N_NUISANCE, f))
    # nuisance factors keep features from being nearly collinear
    x = latent @ mix + 0.3 * rng.normal(size=(n, f))
    latent = latent[:, :2]
    skew = rng.random(f) < 0.4
    x[:, skew] = np.exp(x[:, skew] / 2.0)

    angles = 2.0 * np.pi * np.arange(a) / max(a, 1)
    centres = 0.8 * np.column_stack([np.cos(angles), np.sin(angles)])
    d = np.linalg.norm(latent[:, None, :] - centres[None, :, :], axis=2)
    y = 1.0 + 2.0 * d + 0.1 * rng.random(size=(n, a))

    ids = tuple(f"inst_{i:04d}" for i in range(n))
    sources = tuple(f"S{int(s)}" for s in rng.integers(0, n_sources, size=n))
    return Metadata(
        instance_ids=ids,
        feature_names=tuple(f"f{j + 1}" for j in range(f)),
        algorithm_names=tuple(f"A{k + 1}" for k in range(a)),
        x=x,
        y=y,
        missing_mask=np.zeros((n, f), dtype=bool),
        source_labels=sources,
    )


def to_csv_text(m: Metadata) -> str:
    """Metadata in the ingest CSV grammar."""
    header = ["Instances"]
    if m.source_labels is not None:
        header.append("Source")
    header += [f"feature_{nm}" for nm in m.feature_names]
    header += [f"algo_{nm}" for nm in m.algorithm_names]
    lines = [",".join(header)]
    x = np.asarray(m.x)
    y = np.asarray(m.y)
    for i, iid in enumerate(m.instance_ids):
        cells = [iid]
        if m.source_labels is not None:
            cells.append(m.source_labels[i])
        cells += ["" if np.isnan(v) else repr(float(v)) for v in x[i]]
        cells += [repr(float(v)) for v in y[i]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
