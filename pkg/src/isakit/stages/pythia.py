"""PYTHIA: per-algorithm SVM goodness predictors and the algorithm selector."""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from isakit import svm
from isakit.datamodel import (
    AlgorithmModel,
    AlgorithmSummary,
    IsaOptions,
    PrelimOut,
    PrepOut,
    ProjectionModel,
    PythiaOptions,
    PythiaOut,
    SelectorSummary,
)
from isakit.errors import DegenerateProjection
from isakit.parallel import pmap

GRID_EXPONENTS = (-3.0, 3.0)
# Constant classifiers map every point to these Platt outputs (1.0 / 0.0 in float64).
_CONSTANT_GOOD = svm.PlattScaler(a=0.0, b=-40.0)
_CONSTANT_BAD = svm.PlattScaler(a=0.0, b=40.0)


class Standardized(NamedTuple):
    z_std: np.ndarray
    mean: np.ndarray
    std: np.ndarray


def standardize_coords(z) -> Standardized:
    z = np.asarray(z, dtype=np.float64)
    if len(z) < 2:
        raise DegenerateProjection("need at least two instances to standardise")
    mean = z.mean(axis=0)
    std = z.std(axis=0, ddof=1)
    if np.any(std <= 0) or not np.all(np.isfinite(std)):
        raise DegenerateProjection("a projected coordinate has zero variance")
    return Standardized((z - mean) / std, mean, std)


def stratified_folds(labels, k: int, seed: int) -> np.ndarray:
    """Fold id per instance; each class is shuffled then dealt round-robin."""
    labels = np.asarray(labels, dtype=bool)
    rng = np.random.default_rng(seed)
    folds = np.empty(len(labels), dtype=np.int64)
    offset = 0
    for cls in (False, True):
        idx = rng.permutation(np.flatnonzero(labels == cls))
        folds[idx] = (offset + np.arange(len(idx))) % k
        offset += len(idx)
    return folds


def hyper_grid(resolution: int) -> np.ndarray:
    return 10.0 ** np.linspace(*GRID_EXPONENTS, resolution)


def _kernel(gamma: float, poly: bool) -> svm.Kernel:
    return svm.Kernel.polynomial(gamma) if poly else svm.Kernel.rbf(gamma)


class Scores(NamedTuple):
    accuracy: float
    precision: float
    recall: float


def classification_scores(predicted, actual) -> Scores:
    """Accuracy, precision and recall (w.r.t. the positive class) in percent.

    Undefined ratios (empty denominators) are reported as 0.
    """
    p = np.asarray(predicted, dtype=bool)
    t = np.asarray(actual, dtype=bool)
    tp = np.count_nonzero(p & t)
    acc = 100.0 * np.count_nonzero(p == t) / len(t) if len(t) else 0.0
    prec = 100.0 * tp / np.count_nonzero(p) if p.any() else 0.0
    rec = 100.0 * tp / np.count_nonzero(t) if t.any() else 0.0
    return Scores(float(acc), float(prec), float(rec))


def _fold_decisions(z, y, folds, fold, gamma, costs, poly) -> np.ndarray:
    """Out-of-fold decision values for every cost at one (fold, gamma)."""
    train = folds != fold
    test = ~train
    kern = _kernel(gamma, poly)
    zt = z[train]
    yt = y[train]
    out = np.empty((len(costs), np.count_nonzero(test)))
    if yt.min() == yt.max():
        out[:] = yt[0]
        return out
    k_train = kern(zt, zt)
    k_test = kern(z[test], zt)
    for c_idx, cost in enumerate(costs):
        alpha, bias, _, _ = svm.train_gram(k_train, yt, cost)
        out[c_idx] = k_test @ (alpha * yt) + bias
    return out


def tune_and_train(
    z_std, good, options: PythiaOptions, seed: int = 0, workers: int = 1
) -> AlgorithmModel:
    """Grid-search (cost, gamma) by stratified CV accuracy, then refit on all data.

    Ties go to the smaller cost, then the smaller gamma.  A single-class
    column yields a constant classifier without tuning.
    """
    z = np.asarray(z_std, dtype=np.float64)
    good = np.asarray(good, dtype=bool)
    if good.all() or not good.any():
        label = bool(good[0])
        scores = classification_scores(np.full(len(good), label), good)
        return AlgorithmModel(
            model=None,
            platt=_CONSTANT_GOOD if label else _CONSTANT_BAD,
            cv_accuracy=scores.accuracy,
            precision=scores.precision,
            recall=scores.recall,
            cost=math.nan,
            gamma=math.nan,
            constant_label=1 if label else -1,
        )
    if len(good) < options.cv_folds:
        raise ValueError(f"{len(good)} instances cannot fill {options.cv_folds} folds")

    y = np.where(good, 1.0, -1.0)
    folds = stratified_folds(good, options.cv_folds, seed)
    costs = hyper_grid(options.grid_resolution)
    gammas = hyper_grid(options.grid_resolution)
    tasks = [(f, g) for f in range(options.cv_folds) for g in range(len(gammas))]
    results = pmap(
        lambda t: _fold_decisions(z, y, folds, t[0], gammas[t[1]], costs, options.use_poly_kernel),
        tasks,
        workers,
    )
    oof = np.empty((len(costs), len(gammas), len(y)))
    for (f, g), dec in zip(tasks, results):
        oof[:, g, folds == f] = dec

    best, best_acc = (0, 0), -1.0
    for ci in range(len(costs)):
        for gi in range(len(gammas)):
            acc = float(np.mean((oof[ci, gi] >= 0) == good))
            if acc > best_acc:
                best, best_acc = (ci, gi), acc
    ci, gi = best
    scores = classification_scores(oof[ci, gi] >= 0, good)
    model = svm.train(z, y, costs[ci], _kernel(gammas[gi], options.use_poly_kernel), seed)
    return AlgorithmModel(
        model=model,
        platt=svm.platt_probability(oof[ci, gi], y),
        cv_accuracy=scores.accuracy,
        precision=scores.precision,
        recall=scores.recall,
        cost=float(costs[ci]),
        gamma=float(gammas[gi]),
    )


def good_probability(m: AlgorithmModel, z_std) -> np.ndarray:
    z = np.asarray(z_std, dtype=np.float64)
    if m.model is None:
        return m.platt(np.zeros(len(z)))
    return m.platt(m.model.decision(z))


def _mean_std(v: np.ndarray) -> tuple[float, float]:
    if len(v) == 0:
        return math.nan, math.nan
    std = float(np.std(v, ddof=1)) if len(v) > 1 else 0.0
    return float(np.mean(v)), std


class Selected(NamedTuple):
    probabilities: np.ndarray
    predicted_good: np.ndarray
    selection: np.ndarray
    summary: SelectorSummary


def select(
    models: Sequence[AlgorithmModel],
    z_std,
    y_raw,
    y_bin,
    y_best,
    algorithm_names: Sequence[str],
) -> Selected:
    """Recommend, per instance, the algorithm most likely to be good.

    An instance counts as covered when at least one model predicts good
    (probability >= 0.5); uncovered instances still get the argmax pick.
    """
    y_raw = np.asarray(y_raw, dtype=np.float64)
    y_bin = np.asarray(y_bin, dtype=bool)
    y_best = np.asarray(y_best, dtype=np.float64)
    probs = np.column_stack([good_probability(m, z_std) for m in models])
    predicted = probs >= 0.5
    selection = np.argmax(probs, axis=1).astype(np.int64)
    rows = np.arange(len(selection))
    covered = predicted[rows, selection]

    algs = []
    for j, (name, m) in enumerate(zip(algorithm_names, models)):
        avg, std = _mean_std(y_raw[:, j])
        avg_sel, std_sel = _mean_std(y_raw[(selection == j) & covered, j])
        algs.append(AlgorithmSummary(
            name=name, avg_perf=avg, std_perf=std, frac_good=float(y_bin[:, j].mean()),
            avg_perf_selected=avg_sel, std_perf_selected=std_sel,
            cv_accuracy=m.cv_accuracy, precision=m.precision, recall=m.recall,
            cost=m.cost, gamma=m.gamma,
        ))

    avg, std = _mean_std(y_best)
    oracle = AlgorithmSummary(
        name="Oracle", avg_perf=avg, std_perf=std, frac_good=float(y_bin.any(axis=1).mean()),
        avg_perf_selected=math.nan, std_perf_selected=math.nan,
        cv_accuracy=math.nan, precision=math.nan, recall=math.nan, cost=math.nan, gamma=math.nan,
    )

    chosen_perf = y_raw[rows, selection]
    chosen_good = y_bin[rows, selection]
    avg, std = _mean_std(chosen_perf)
    avg_sel, std_sel = _mean_std(chosen_perf[covered])
    scores = classification_scores(covered, chosen_good)
    selector = AlgorithmSummary(
        name="Selector", avg_perf=avg, std_perf=std, frac_good=float(chosen_good.mean()),
        avg_perf_selected=avg_sel, std_perf_selected=std_sel,
        cv_accuracy=scores.accuracy, precision=scores.precision, recall=scores.recall,
        cost=math.nan, gamma=math.nan,
    )
    return Selected(probs, predicted, selection, SelectorSummary(tuple(algs), oracle, selector))


def run_pythia(
    prep: PrepOut, prelim: PrelimOut, projection: ProjectionModel, options: IsaOptions
) -> PythiaOut:
    std = standardize_coords(projection.z)
    po = options.pythia
    workers = options.parallel.workers
    y_bin = np.asarray(prelim.y_bin)
    models = [
        tune_and_train(std.z_std, y_bin[:, j], po, seed=po.seed, workers=workers)
        for j in range(y_bin.shape[1])
    ]
    md = prep.metadata_clean
    sel = select(models, std.z_std, md.y, y_bin, prelim.y_best, md.algorithm_names)
    return PythiaOut(
        models=tuple(models),
        probabilities=sel.probabilities,
        predicted_good=sel.predicted_good,
        selection=sel.selection,
        summary=sel.summary,
        coord_mean=std.mean,
        coord_std=std.std,
    )
