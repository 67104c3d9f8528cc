import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp
from scipy import stats

from isakit.datamodel import IsaOptions, PerfOptions
from isakit.errors import DegenerateColumn
from isakit.stages import prelim
from isakit.stages.prep import preprocess
from tests.conftest import tiny_metadata
from tests.oracles import boxcox_lambda_scan


def test_binarize_absolute_minimisation():
    b = prelim.binarize([[1, 2], [3, 1]], PerfOptions(abs_perf=True, epsilon=1.5))
    np.testing.assert_array_equal(b.y_bin, [[True, False], [False, True]])
    np.testing.assert_array_equal(b.y_best, [1, 1])
    np.testing.assert_array_equal(b.p_best, [0, 1])


def test_binarize_relative_maximisation():
    b = prelim.binarize([[10, 9]], PerfOptions(max_perf=True, epsilon=0.2))
    np.testing.assert_array_equal(b.y_bin, [[True, True]])
    b = prelim.binarize([[10, 7.9]], PerfOptions(max_perf=True, epsilon=0.2))
    np.testing.assert_array_equal(b.y_bin, [[True, False]])


@pytest.mark.parametrize("max_perf", [False, True])
@pytest.mark.parametrize("abs_perf", [False, True])
def test_tie_goes_to_lowest_index(max_perf, abs_perf):
    b = prelim.binarize([[5, 5]], PerfOptions(max_perf=max_perf, abs_perf=abs_perf))
    assert b.p_best[0] == 0 and b.best_ties[0] == 2


@pytest.mark.parametrize(
    "row,beta,expected",
    [([1, 0, 1, 0], 0.5, True), ([0, 0], 0.5, False), ([1, 1], 1.0, True), ([1, 0], 1.0, False)],
)
def test_beta_easy(row, beta, expected):
    assert prelim.beta_easy(np.array([row], dtype=bool), beta)[0] == expected


y_mats = hnp.arrays(
    np.float64, hnp.array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=6),
    elements=st.floats(0.01, 100.0),
)


@settings(max_examples=80, deadline=None)
@given(y_mats, st.booleans(), st.floats(0.01, 0.9))
def test_best_is_always_good_for_relative_thresholds(y, max_perf, eps):
    b = prelim.binarize(y, PerfOptions(max_perf=max_perf, epsilon=eps))
    assert b.y_bin[np.arange(len(y)), b.p_best].all()


@settings(max_examples=80, deadline=None)
@given(y_mats, st.floats(0.01, 50.0), st.floats(0.0, 50.0))
def test_larger_epsilon_never_turns_good_bad(y, eps, extra):
    lo = prelim.binarize(y, PerfOptions(abs_perf=True, epsilon=eps)).y_bin
    hi = prelim.binarize(y, PerfOptions(abs_perf=True, epsilon=eps + extra)).y_bin
    assert not (lo & ~hi).any()


def test_bound_zero_iqr_passthrough():
    col = np.array([[0.0], [0], [0], [0], [100]])
    np.testing.assert_array_equal(prelim.bound(col, 5).x_bounded, col)


def test_bound_clips_outlier_at_hand_computed_fence():
    col = np.array([1, 2, 3, 4, 5, 6, 7, 8, 9, 1000.0])[:, None]
    # type 7: q1 at rank 2.25 -> 3.25, q3 at rank 6.75 -> 7.75, median 5.5
    q1, med, q3 = prelim.type7_quartiles(col[:, 0])
    assert (q1, med, q3) == (3.25, 5.5, 7.75)
    out = prelim.bound(col, 5)
    assert out.x_bounded[-1, 0] == 28.0
    np.testing.assert_array_equal(out.x_bounded[:-1, 0], col[:-1, 0])


def test_bound_identity_within_fences():
    x = np.random.default_rng(0).normal(size=(30, 3))
    np.testing.assert_array_equal(prelim.bound(x, 5).x_bounded, x)


def test_bound_clips_infinities():
    col = np.array([1, 2, 3, 4, np.inf, -np.inf])[:, None]
    out = prelim.bound(col, 1).x_bounded
    assert np.isfinite(out).all()


@settings(max_examples=60, deadline=None)
@given(
    hnp.arrays(np.float64, st.tuples(st.integers(3, 20), st.just(3)), elements=st.floats(-1e6, 1e6)),
    st.floats(4.0, 10.0),
)
def test_bound_idempotent(x, k):
    # for k >= 4 the order statistics around the type-7 quartile ranks lie
    # inside the fences, so clipping leaves the fences unchanged
    once = prelim.bound(x, k).x_bounded
    np.testing.assert_array_equal(prelim.bound(once, k).x_bounded, once)


def test_normalize_small_column():
    out = prelim.normalize(np.array([[1.0], [2.0], [3.0]]))
    assert abs(out.x_norm.mean()) < 1e-9
    assert abs(out.x_norm.std(ddof=1) - 1) < 1e-9


def test_lognormal_column_prefers_log():
    rng = np.random.default_rng(5)
    col = np.exp(rng.normal(size=400))
    lam = prelim.fit_box_cox_lambda(col - col.min() + 1)
    oracle = boxcox_lambda_scan(col - col.min() + 1)
    assert abs(lam - oracle) < 1e-3
    # shifting to a minimum of 1 bends the log shape, but lambda stays well below 1
    assert lam < 0.5
    lam_raw = prelim.fit_box_cox_lambda(col)
    assert abs(lam_raw) < 0.2


def test_loglik_matches_scipy_up_to_constant():
    x = np.random.default_rng(2).gamma(2.0, size=100) + 0.5
    diffs = [prelim.box_cox_loglik(x, l) - stats.boxcox_llf(l, x) for l in (-2, -0.5, 0, 0.7, 3)]
    np.testing.assert_allclose(diffs, diffs[0], atol=1e-8)


def test_stored_params_replay_exactly():
    x = np.random.default_rng(3).lognormal(size=(50, 4))
    out = prelim.normalize(x)
    for j, p in enumerate(out.params):
        np.testing.assert_allclose(prelim.apply_norm_params(x[:, j], p), out.x_norm[:, j],
                                   rtol=0, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_normalize_inverts(seed):
    rng = np.random.default_rng(seed)
    x = np.column_stack([rng.lognormal(size=40), rng.normal(size=40), rng.exponential(size=40)])
    out = prelim.normalize(x)
    for j, p in enumerate(out.params):
        back = prelim.invert_norm_params(out.x_norm[:, j], p)
        np.testing.assert_allclose(back, x[:, j], rtol=1e-6, atol=1e-9)


def test_constant_column_degenerate():
    with pytest.raises(DegenerateColumn):
        prelim.normalize(np.ones((5, 1)))
    out = prelim.normalize(np.ones((5, 1)), allow_constant=True)
    np.testing.assert_array_equal(out.x_norm, 0.0)


def test_golden_section_finds_quadratic_peak():
    assert abs(prelim.golden_section_max(lambda t: -(t - 1.234) ** 2, -5, 5, 1e-7) - 1.234) < 1e-6


def test_run_prelim_shapes_and_y_normalisation():
    m = tiny_metadata(20, 4, 3, seed=4)
    out = prelim.run_prelim(preprocess(m), IsaOptions())
    assert out.x_norm.shape == (20, 4) and out.y_norm.shape == (20, 3)
    np.testing.assert_allclose(out.x_norm.mean(axis=0), 0, atol=1e-9)
    np.testing.assert_allclose(out.y_norm.std(axis=0, ddof=1), 1, atol=1e-9)
    assert len(out.norm_params) == 4 and len(out.y_norm_params) == 3
    assert out.beta_easy.shape == (20,)


def test_run_prelim_without_normalisation():
    import dataclasses

    o = IsaOptions()
    o = dataclasses.replace(o, norm=dataclasses.replace(o.norm, enabled=False),
                            bound=dataclasses.replace(o.bound, enabled=False))
    m = tiny_metadata(10, 3, 2, seed=1)
    out = prelim.run_prelim(preprocess(m), o)
    np.testing.assert_array_equal(out.x_norm, m.x)
    assert all(math.isnan(p.box_cox_lambda) for p in out.norm_params)
