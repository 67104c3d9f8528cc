import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from isakit import serialize
from isakit.datamodel import Metadata
from isakit.geometry import Polygon


def assert_same_numbers(a, b, tol=1e-12):
    la, lb = serialize.numeric_leaves(a), serialize.numeric_leaves(b)
    assert la.keys() == lb.keys()
    for k in la:
        np.testing.assert_allclose(lb[k], la[k], rtol=tol, atol=tol, err_msg=k)


def test_every_artifact_round_trips(fast_model):
    assert len(fast_model.artifacts) == 7
    for kind, art in fast_model.artifacts.items():
        text = serialize.to_csv(art)
        back = serialize.from_csv(text)
        assert type(back) is type(art), kind
        assert_same_numbers(art, back)
        assert serialize.to_csv(back) == text, kind


def test_polygon_with_hole_round_trips():
    outer = np.array([[0, 0], [4, 0], [4, 4], [0, 4]], float)
    hole = np.array([[1, 1], [1, 2], [2, 2], [2, 1]], float)
    p = Polygon(outer, (hole,))
    back = serialize.from_csv(serialize.to_csv(p))
    np.testing.assert_array_equal(back.exterior, p.exterior)
    assert len(back.holes) == 1 and back.area == pytest.approx(p.area)


@given(hnp.arrays(np.float64, hnp.array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=6),
                  elements=st.floats(allow_nan=True, allow_infinity=True)))
def test_float_arrays_exact(x):
    n, f = x.shape
    m = Metadata(
        instance_ids=tuple(f"i{k}" for k in range(n)),
        feature_names=tuple(f"f{k}" for k in range(f)),
        algorithm_names=("a",),
        x=np.nan_to_num(x, nan=0.0, posinf=1.0, neginf=-1.0),
        y=np.ones((n, 1)),
        missing_mask=np.isnan(x),
        source_labels=None,
    )
    back = serialize.from_csv(serialize.to_csv(m))
    np.testing.assert_array_equal(back.x, m.x)
    np.testing.assert_array_equal(back.missing_mask, m.missing_mask)
    assert back.instance_ids == m.instance_ids and back.source_labels is None


def test_rejects_foreign_text():
    with pytest.raises(ValueError):
        serialize.from_csv("a,b\n1,2\n")
