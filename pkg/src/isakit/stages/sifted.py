"""SIFTED: correlation screening, feature clustering, representative selection."""

from __future__ import annotations

import itertools
import logging
import math
from typing import NamedTuple, Sequence

import numpy as np

from isakit.datamodel import IsaOptions, PrelimOut, PrepOut, SiftedOut
from isakit.errors import DegenerateClustering, IsaError
from isakit.parallel import pmap
from isakit.stages import pilot

log = logging.getLogger(__name__)

MIN_SURVIVORS = 3
EXHAUSTIVE_LIMIT = 1000
MUTATION_RATE = 0.1
IDENTICAL_TOL = 1e-12


def pearson_columns(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pearson correlation between every column of ``a`` and every column of ``b``.

    Columns without variance correlate 0 with everything.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ac = a - a.mean(axis=0)
    bc = b - b.mean(axis=0)
    na = np.sqrt(np.sum(ac * ac, axis=0))
    nb = np.sqrt(np.sum(bc * bc, axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (ac.T @ bc) / np.outer(na, nb)
    r = np.where(np.isfinite(r), r, 0.0)
    return np.clip(r, -1.0, 1.0)


class Screened(NamedTuple):
    corr: np.ndarray
    survivors: np.ndarray


def correlation_screen(x_norm, y_norm, rho: float) -> Screened:
    """Keep features whose strongest |corr| with any algorithm reaches ``rho``.

    At least three features (or all, if fewer exist) always survive: the ones
    with highest max |corr|.
    """
    corr = pearson_columns(x_norm, y_norm)
    strength = np.max(np.abs(corr), axis=1)
    survivors = np.flatnonzero(strength >= rho)
    need = min(MIN_SURVIVORS, len(strength))
    if len(survivors) < need:
        order = np.argsort(-strength, kind="stable")
        survivors = np.sort(order[:need])
    return Screened(corr, survivors.astype(np.int64))


def dissimilarity(features: np.ndarray) -> np.ndarray:
    """1 - |Pearson| between feature columns (instances along axis 0)."""
    d = 1.0 - np.abs(pearson_columns(features, features))
    np.fill_diagonal(d, 0.0)
    return np.maximum(d, 0.0)


def n_distinct(d: np.ndarray) -> int:
    """Number of groups of mutually identical (d == 0) features."""
    seen = np.zeros(len(d), dtype=bool)
    groups = 0
    for i in range(len(d)):
        if not seen[i]:
            seen |= d[i] <= IDENTICAL_TOL
            groups += 1
    return groups


def _assign(d: np.ndarray, medoids: np.ndarray) -> np.ndarray:
    dist = d[:, medoids]
    labels = np.argmin(dist, axis=1)
    labels[medoids] = np.arange(len(medoids))
    return labels


def _kmedoids_once(d: np.ndarray, medoids: np.ndarray, max_iter: int = 100):
    medoids = np.sort(medoids)
    for _ in range(max_iter):
        labels = _assign(d, medoids)
        new = medoids.copy()
        for c in range(len(medoids)):
            members = np.flatnonzero(labels == c)
            cost = d[np.ix_(members, members)].sum(axis=1)
            new[c] = members[np.argmin(cost)]
        new = np.sort(new)
        if np.array_equal(new, medoids):
            break
        medoids = new
    labels = _assign(d, medoids)
    total = float(sum(d[i, medoids[labels[i]]] for i in range(len(d))))
    return labels, total


def relabel(labels: np.ndarray) -> np.ndarray:
    """Renumber cluster ids in order of first appearance."""
    mapping: dict[int, int] = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        out[i] = mapping.setdefault(int(lab), len(mapping))
    return out


def cluster_features(features, k: int, seed: int = 0, restarts: int = 30) -> np.ndarray:
    """k-medoids on the 1 - |corr| dissimilarity, best of seeded restarts.

    ``features`` is n-by-s (instances by screened features).
    """
    d = dissimilarity(np.asarray(features, dtype=np.float64))
    s = len(d)
    if not 2 <= k <= s:
        raise ValueError(f"need 2 <= k <= {s} features, got k={k}")
    distinct = n_distinct(d)
    if distinct < k:
        raise DegenerateClustering(
            f"only {distinct} distinct features among {s}; cannot form {k} clusters"
        )
    rng = np.random.default_rng(seed)
    best_labels, best_total = None, math.inf
    for _ in range(restarts):
        labels, total = _kmedoids_once(d, rng.choice(s, size=k, replace=False))
        if total < best_total - 1e-15:
            best_labels, best_total = labels, total
    return relabel(best_labels)


# ------------------------------------------------------------ representatives


def subset_fitness(x_norm, y_norm, subset: Sequence[int], seed: int) -> float:
    """Correlation between actual and projection-predicted performance."""
    xbar = np.asarray(x_norm)[:, list(subset)].T
    ybar = np.asarray(y_norm).T
    try:
        model = pilot.numeric_solve(xbar, ybar, n_tries=1, seed=seed)
    except IsaError:
        return -math.inf
    pred = model.c @ model.a @ xbar
    r = pearson_columns(ybar.reshape(-1, 1), pred.reshape(-1, 1))[0, 0]
    return float(r) if np.isfinite(r) else -math.inf


class Selection(NamedTuple):
    indices: np.ndarray
    score: float
    exhaustive: bool


def _members(clusters: np.ndarray, candidates: np.ndarray) -> list[np.ndarray]:
    k = int(clusters.max()) + 1
    return [np.sort(candidates[clusters == c]) for c in range(k)]


def select_representatives(
    clusters,
    candidates,
    x_norm,
    y_norm,
    *,
    ga_population: int = 50,
    ga_generations: int = 100,
    seed: int = 0,
    workers: int = 1,
) -> Selection:
    """Pick one feature per cluster maximising :func:`subset_fitness`.

    ``candidates[i]`` is the column of ``x_norm`` for the i-th clustered
    feature.  Search is exhaustive up to 1000 combinations, genetic beyond.
    """
    clusters = np.asarray(clusters, dtype=np.int64)
    candidates = np.asarray(candidates, dtype=np.int64)
    groups = _members(clusters, candidates)
    cache: dict[tuple[int, ...], float] = {}

    def evaluate(chromosomes: list[tuple[int, ...]]) -> list[float]:
        fresh = [c for c in dict.fromkeys(chromosomes) if c not in cache]
        scores = pmap(
            lambda c: subset_fitness(x_norm, y_norm, sorted(g[i] for g, i in zip(groups, c)), seed),
            fresh,
            workers,
        )
        cache.update(zip(fresh, scores))
        return [cache[c] for c in chromosomes]

    def to_indices(chrom: tuple[int, ...]) -> np.ndarray:
        return np.sort(np.array([g[i] for g, i in zip(groups, chrom)], dtype=np.int64))

    sizes = [len(g) for g in groups]
    if math.prod(sizes) <= EXHAUSTIVE_LIMIT:
        combos = list(itertools.product(*(range(s) for s in sizes)))
        scores = evaluate(combos)
        best = int(np.argmax(scores))
        return Selection(to_indices(combos[best]), scores[best], True)

    chrom, score = genetic_search(sizes, evaluate, ga_population, ga_generations, seed)
    return Selection(to_indices(chrom), score, False)


def genetic_search(sizes, evaluate, population: int, generations: int, seed: int):
    """Seeded GA over cluster-choice chromosomes.

    Binary tournament parents, one-point crossover, per-gene mutation 0.1,
    one elite carried over.  ``evaluate`` maps a list of chromosomes to scores.
    """
    rng = np.random.default_rng(seed)
    n_genes = len(sizes)

    def random_chrom() -> tuple[int, ...]:
        return tuple(int(rng.integers(s)) for s in sizes)

    pop = [random_chrom() for _ in range(population)]
    scores = evaluate(pop)
    best_i = int(np.argmax(scores))
    best, best_score = pop[best_i], scores[best_i]
    for _ in range(generations):
        def tournament() -> tuple[int, ...]:
            i, j = rng.integers(population, size=2)
            return pop[i] if scores[i] >= scores[j] else pop[j]

        children = [pop[int(np.argmax(scores))]]
        while len(children) < population:
            p1, p2 = tournament(), tournament()
            cut = int(rng.integers(1, n_genes)) if n_genes > 1 else 0
            child = list(p1[:cut] + p2[cut:])
            for g in range(n_genes):
                if rng.random() < MUTATION_RATE:
                    child[g] = int(rng.integers(sizes[g]))
            children.append(tuple(child))
        pop = children
        scores = evaluate(pop)
        i = int(np.argmax(scores))
        if scores[i] > best_score:
            best, best_score = pop[i], scores[i]
    return best, best_score


def run_sifted(prep: PrepOut, prelim: PrelimOut, options: IsaOptions) -> SiftedOut:
    so = options.sifted
    screened = correlation_screen(prelim.x_norm, prelim.y_norm, so.rho)
    survivors = screened.survivors
    k = min(so.k, len(survivors))
    x_screened = np.asarray(prelim.x_norm)[:, survivors]
    if k < 2:
        raise DegenerateClustering("fewer than two features survive screening")
    clusters = cluster_features(x_screened, k, seed=so.seed, restarts=so.max_tries)
    sel = select_representatives(
        clusters,
        survivors,
        prelim.x_norm,
        prelim.y_norm,
        ga_population=so.ga_population,
        ga_generations=so.ga_generations,
        seed=so.seed,
        workers=options.parallel.workers,
    )
    names = prep.metadata_clean.feature_names
    log.info("selected features: %s", ", ".join(names[i] for i in sel.indices))
    return SiftedOut(
        selected_feature_indices=sel.indices,
        selected_feature_names=tuple(names[i] for i in sel.indices),
        feature_algorithm_corr=screened.corr,
        screened_feature_indices=survivors,
        cluster_assignment=clusters,
        selection_score=sel.score,
    )
