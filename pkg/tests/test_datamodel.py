import dataclasses

import numpy as np
import pytest

from isakit.datamodel import (
    IsaOptions,
    NormParams,
    PerfOptions,
    PythiaOptions,
    SiftedOptions,
    TraceOptions,
    validate_metadata,
)
from isakit.errors import OptionOutOfRange
from tests.conftest import tiny_metadata


def test_well_formed_metadata_has_no_diagnostics():
    assert validate_metadata(tiny_metadata(5, 3, 2)) == []


def test_duplicate_id_named_once():
    m = dataclasses.replace(tiny_metadata(), instance_ids=("i0", "i1", "i1", "i3", "i4"))
    diags = validate_metadata(m)
    assert len(diags) == 1
    assert "'i1'" in diags[0]


def test_two_instances_too_few():
    diags = validate_metadata(tiny_metadata(n=2))
    assert any("too few instances" in d for d in diags)


def test_unflagged_nan_and_missing_y_reported():
    x = np.ones((5, 3))
    x[1, 2] = np.nan
    y = np.ones((5, 2))
    y[3, 0] = np.nan
    diags = validate_metadata(tiny_metadata(x=x, y=y))
    assert any("row 1" in d and "NaN" in d for d in diags)
    assert any("missing performance" in d and "row 3" in d for d in diags)


def test_arrays_are_read_only_copies():
    x = np.zeros((5, 3))
    m = tiny_metadata(x=x)
    x[0, 0] = 9
    assert m.x[0, 0] == 0
    with pytest.raises(ValueError):
        m.x[0, 0] = 1
    with pytest.raises(dataclasses.FrozenInstanceError):
        m.x = x


def test_defaults():
    o = IsaOptions()
    assert o.trace.purity_pi == 0.55
    assert o.sifted.rho == 0.1 and o.sifted.k == 10
    assert o.cloister.c_thres == 0.7 and o.cloister.p_val == 0.05
    assert o.pythia.cv_folds == 5 and o.pythia.grid_resolution == 10
    assert o.bound.iqr_multiplier == 5.0
    assert o.pilot.n_tries == 5


@pytest.mark.parametrize(
    "ctor,kwargs,key",
    [
        (PythiaOptions, {"cv_folds": 1}, "pythia.cv_folds"),
        (SiftedOptions, {"k": 1}, "sifted.k"),
        (SiftedOptions, {"rho": 1.5}, "sifted.rho"),
        (PerfOptions, {"epsilon": 0.0}, "perf.epsilon"),
        (PerfOptions, {"beta_threshold": 0.0}, "perf.beta_threshold"),
        (TraceOptions, {"purity_pi": 1.0}, "trace.purity_pi"),
    ],
)
def test_out_of_range_rejected(ctor, kwargs, key):
    with pytest.raises(OptionOutOfRange) as err:
        ctor(**kwargs)
    assert err.value.key == key


def test_with_seed_sets_every_stochastic_stage():
    o = IsaOptions().with_seed(42)
    assert o.sifted.seed == o.pilot.seed == o.pythia.seed == 42


def test_norm_params_identity_marker():
    p = NormParams(shift=0.0, box_cox_lambda=float("nan"), mean=0.0, stddev=1.0)
    assert np.isnan(p.box_cox_lambda)
