import json
import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isakit import ingest
from isakit.errors import (
    IoFailure,
    MalformedJson,
    MissingInstancesColumn,
    MissingPerformanceValue,
    NoAlgorithmColumns,
    NoFeatureColumns,
    NonNumericCell,
    OptionOutOfRange,
    RaggedRow,
    WrongType,
)

MINIMAL = "Instances,feature_a,feature_b,algo_s\nx1,1,2,3\nx2,4,5,6\nx3,7,8,9\n"


def test_minimal_file():
    m = ingest.parse_metadata_csv(MINIMAL)
    assert (m.n_instances, m.n_features, m.n_algorithms) == (3, 2, 1)
    assert m.feature_names == ("a", "b")
    assert m.algorithm_names == ("s",)
    np.testing.assert_array_equal(m.y[:, 0], [3, 6, 9])
    assert m.source_labels is None


def test_no_algorithm_columns():
    with pytest.raises(NoAlgorithmColumns):
        ingest.parse_metadata_csv("Instances,feature_a,feature_b\nx,1,2\n")


def test_no_feature_columns():
    with pytest.raises(NoFeatureColumns):
        ingest.parse_metadata_csv("Instances,algo_a\nx,1\n")


def test_missing_instances_column():
    with pytest.raises(MissingInstancesColumn):
        ingest.parse_metadata_csv("feature_a,algo_a\n1,1\n")


def test_empty_feature_cell_is_missing():
    text = "Instances,feature_a,feature_b,algo_s\nx1,1,2,3\nx2,,5,6\nx3,7,NaN,9\n"
    m = ingest.parse_metadata_csv(text)
    assert m.missing_mask[1, 0] and m.missing_mask[2, 1]
    assert m.missing_mask.sum() == 2
    assert np.isnan(m.x[1, 0])


def test_non_numeric_cell_names_row_and_column():
    text = "Instances,feature_a,feature_b,algo_s\nx1,1,oops,3\n"
    with pytest.raises(NonNumericCell) as err:
        ingest.parse_metadata_csv(text)
    assert err.value.col == "feature_b"


def test_empty_performance_cell():
    with pytest.raises(MissingPerformanceValue):
        ingest.parse_metadata_csv("Instances,feature_a,feature_b,algo_s\nx1,1,2,\n")


def test_inf_allowed_in_x_rejected_in_y():
    m = ingest.parse_metadata_csv("Instances,feature_a,feature_b,algo_s\nx1,Inf,2,3\n")
    assert np.isposinf(m.x[0, 0])
    with pytest.raises(NonNumericCell):
        ingest.parse_metadata_csv("Instances,feature_a,feature_b,algo_s\nx1,1,2,-Inf\n")


def test_ragged_row():
    with pytest.raises(RaggedRow):
        ingest.parse_metadata_csv("Instances,feature_a,feature_b,algo_s\nx1,1,2\n")


def test_case_insensitive_instances_and_source():
    text = "instances,SOURCE,feature_a,feature_b,algo_s\nx1,lib,1,2,3\n"
    m = ingest.parse_metadata_csv(text)
    assert m.instance_ids == ("x1",)
    assert m.source_labels == ("lib",)


def test_crlf_and_bom_insensitive():
    a = ingest.parse_metadata_csv(MINIMAL)
    b = ingest.parse_metadata_csv("﻿" + MINIMAL.replace("\n", "\r\n"))
    assert a.instance_ids == b.instance_ids and a.feature_names == b.feature_names
    np.testing.assert_array_equal(a.x, b.x)


def test_column_order_preserved():
    text = "Instances,algo_z,feature_q,algo_b,feature_c\nx,1,2,3,4\n"
    m = ingest.parse_metadata_csv(text)
    assert m.feature_names == ("q", "c") and m.algorithm_names == ("z", "b")


def test_empty_options_are_defaults():
    o = ingest.parse_options_json("{}")
    assert o.trace.purity_pi == 0.55


def test_partial_override():
    o = ingest.parse_options_json('{"cloister": {"c_thres": 0.7, "p_val": 0.01}}')
    assert o.cloister.c_thres == 0.7 and o.cloister.p_val == 0.01
    assert o.sifted.k == 10


def test_cv_folds_out_of_range():
    with pytest.raises(OptionOutOfRange) as err:
        ingest.parse_options_json('{"pythia": {"cv_folds": 1}}')
    assert err.value.key == "pythia.cv_folds" and err.value.value == 1


def test_camel_case_keys_accepted():
    o = ingest.parse_options_json('{"perf": {"MaxPerf": true, "AbsPerf": true, "epsilon": 2}}')
    assert o.perf.max_perf and o.perf.abs_perf and o.perf.epsilon == 2.0


def test_wrong_type():
    with pytest.raises(WrongType):
        ingest.parse_options_json('{"pythia": {"cv_folds": "five"}}')
    with pytest.raises(WrongType):
        ingest.parse_options_json('{"perf": {"max_perf": 1}}')


def test_malformed_json():
    with pytest.raises(MalformedJson):
        ingest.parse_options_json("{not json")


def test_unknown_keys_warn(caplog):
    with caplog.at_level(logging.WARNING):
        o = ingest.parse_options_json('{"extra": 1, "trace": {"colour": "red"}}')
    assert o.trace.purity_pi == 0.55
    assert "extra" in caplog.text and "colour" in caplog.text


def test_missing_file_raises_io_failure(tmp_path):
    with pytest.raises(IoFailure) as err:
        ingest.from_csv_file(tmp_path / "absent.csv")
    assert "absent.csv" in str(err.value)


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(finite, finite, finite), min_size=1, max_size=8))
def test_numeric_cells_round_trip_exactly(rows):
    lines = ["Instances,feature_a,feature_b,algo_s"]
    lines += [f"r{i},{a!r},{b!r},{c!r}" for i, (a, b, c) in enumerate(rows)]
    m = ingest.parse_metadata_csv("\n".join(lines))
    np.testing.assert_array_equal(m.x, np.array([[a, b] for a, b, _ in rows]))
    np.testing.assert_array_equal(m.y[:, 0], [c for *_, c in rows])


def test_json_file_round_trip(tmp_path):
    p = tmp_path / "o.json"
    p.write_text(json.dumps({"sifted": {"k": 4}}))
    assert ingest.from_json_file(p).sifted.k == 4
