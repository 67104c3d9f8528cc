import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isakit import geometry
from isakit.datamodel import IsaOptions
from isakit.errors import DegenerateBoundary, TooManyFeatures
from isakit.stages import cloister


def test_unit_square_corners_in_bit_order():
    c = cloister.generate_corners([0, 0], [1, 1])
    np.testing.assert_array_equal(c, [[0, 0], [0, 1], [1, 0], [1, 1]])


def test_corner_count_and_lexicographic_order():
    c = cloister.generate_corners([0, 0, 0], [1, 1, 1])
    assert len(c) == 8
    assert [tuple(r) for r in c] == sorted(itertools.product([0.0, 1.0], repeat=3))


def test_too_many_features():
    with pytest.raises(TooManyFeatures):
        cloister.generate_corners(np.zeros(21), np.ones(21))


def test_positive_correlation_keeps_same_extremes():
    corners = cloister.generate_corners([0, 0], [1, 1])
    kept = cloister.prune_corners(corners, np.array([[1, 1.0], [1.0, 1]]), 0.7)
    np.testing.assert_array_equal(kept, [[0, 0], [1, 1]])


def test_zero_correlation_keeps_all():
    corners = cloister.generate_corners([0, 0, 0], [1, 1, 1])
    assert len(cloister.prune_corners(corners, np.eye(3), 0.7)) == 8


def brute_force_keep(corners, lo, corr, c_thres):
    keep = []
    for c in corners:
        hi_choice = c != lo
        ok = True
        for i, j in itertools.combinations(range(len(c)), 2):
            if corr[i, j] > c_thres and hi_choice[i] != hi_choice[j]:
                ok = False
            if corr[i, j] < -c_thres and hi_choice[i] == hi_choice[j]:
                ok = False
        keep.append(ok)
    return corners[np.array(keep)]


def test_mixed_constraints_match_brute_force():
    corr = np.array([[1, 0.9, 0], [0.9, 1, -0.9], [0, -0.9, 1.0]])
    lo, hi = np.zeros(3), np.ones(3)
    corners = cloister.generate_corners(lo, hi)
    kept = cloister.prune_corners(corners, corr, 0.7)
    assert len(kept) == 2
    np.testing.assert_array_equal(kept, brute_force_keep(corners, lo, corr, 0.7))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 6))
def test_pruning_matches_brute_force_and_is_monotone(seed, f):
    rng = np.random.default_rng(seed)
    r = rng.uniform(-1, 1, size=(f, f))
    corr = np.clip((r + r.T) / 2, -1, 1)
    np.fill_diagonal(corr, 1)
    lo, hi = -rng.random(f) - 0.1, rng.random(f) + 0.1
    corners = cloister.generate_corners(lo, hi)
    counts = []
    for t in (0.9, 0.7, 0.5, 0.3):
        kept = cloister.prune_corners(corners, corr, t)
        np.testing.assert_array_equal(kept, brute_force_keep(corners, lo, corr, t))
        counts.append(len(kept))
    assert counts == sorted(counts, reverse=True)


def test_streamed_projection_equals_direct(monkeypatch):
    monkeypatch.setattr(cloister, "_CHUNK", 8)
    rng = np.random.default_rng(1)
    f = 7
    corr = np.eye(f)
    corr[0, 3] = corr[3, 0] = 0.95
    lo, hi, a = -np.ones(f), np.ones(f), rng.normal(size=(2, f))
    direct = cloister.prune_corners(cloister.generate_corners(lo, hi), corr, 0.7) @ a.T
    np.testing.assert_allclose(cloister.projected_kept_corners(lo, hi, corr, 0.7, a), direct)


def test_square_under_identity():
    corners = cloister.generate_corners([0, 0], [1, 1])
    out = cloister.boundary_hull(corners, np.eye(2))
    assert abs(out.boundary.area - 1.0) < 1e-12
    assert out.corners_kept == 4


def test_all_pruned_is_degenerate():
    with pytest.raises(DegenerateBoundary):
        cloister.boundary_hull(np.zeros((0, 3)), np.ones((2, 3)))


def test_instances_within_bounds_project_inside():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(2, 4))
    lo, hi = -np.ones(4), np.array([1.0, 2.0, 0.5, 1.5])
    out = cloister.boundary_hull(cloister.generate_corners(lo, hi), a)
    pts = rng.uniform(lo, hi, size=(2000, 4)) @ a.T
    assert geometry.contains_points(out.boundary, pts).all()
    hull_vertices = {tuple(np.round(v, 12)) for v in out.boundary.exterior}
    projected = {tuple(np.round(v, 12)) for v in cloister.generate_corners(lo, hi) @ a.T}
    assert hull_vertices <= projected


def test_significance_gate():
    corr = np.array([[1.0, 0.3], [0.3, 1.0]])
    gated = cloister.significant_correlation(corr, 10, 0.05)
    assert gated[0, 1] == 0.0 and gated[0, 0] == 1.0
    assert cloister.significant_correlation(corr, 1000, 0.05)[0, 1] == 0.3


def test_run_cloister_degenerate_boundary_warns(caplog):
    from types import SimpleNamespace

    x = np.column_stack([np.linspace(-1, 1, 10), np.linspace(-1, 1, 10)])
    pre = SimpleNamespace(x_norm=x)
    sif = SimpleNamespace(selected_feature_indices=np.array([0, 1]))
    proj = SimpleNamespace(a=np.eye(2))
    out = cloister.run_cloister(pre, sif, proj, IsaOptions())
    assert out.boundary is None and out.corners_kept == 2 and out.warning
