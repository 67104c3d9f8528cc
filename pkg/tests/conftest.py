import numpy as np
import pytest

from isakit.datamodel import IsaOptions, Metadata
from isakit.synthetic import make_metadata


@pytest.fixture
def small_metadata() -> Metadata:
    return make_metadata(n=60, f=5, a=3, seed=3)


@pytest.fixture
def fast_options() -> IsaOptions:
    import dataclasses

    o = IsaOptions()
    return dataclasses.replace(
        o,
        pythia=dataclasses.replace(o.pythia, grid_resolution=4, cv_folds=3),
        pilot=dataclasses.replace(o.pilot, n_tries=2),
    )


def tiny_metadata(n=5, f=3, a=2, seed=0, **kw) -> Metadata:
    rng = np.random.default_rng(seed)
    return Metadata(
        instance_ids=tuple(f"i{k}" for k in range(n)),
        feature_names=tuple(f"f{k}" for k in range(f)),
        algorithm_names=tuple(f"a{k}" for k in range(a)),
        x=kw.get("x", rng.normal(size=(n, f))),
        y=kw.get("y", rng.random((n, a))),
        missing_mask=kw.get("missing_mask", np.zeros((n, f), dtype=bool)),
        source_labels=kw.get("source_labels"),
    )


@pytest.fixture(scope="session")
def fast_model():
    """A complete small pipeline run shared by output-format tests."""
    import dataclasses

    from isakit import pipeline

    o = IsaOptions()
    o = dataclasses.replace(
        o,
        pythia=dataclasses.replace(o.pythia, grid_resolution=4, cv_folds=3),
        pilot=dataclasses.replace(o.pilot, n_tries=2),
    )
    return pipeline.run(make_metadata(n=80, f=6, a=3, seed=11), o)


_CRITERIA: dict[int, tuple[str, str, float]] = {}


def pytest_runtest_logreport(report):
    number = getattr(report, "criterion", None)
    if number is None:
        return
    title = report.criterion_title
    if report.when == "call" or report.outcome != "passed":
        outcome = report.outcome.upper() if report.outcome != "failed" else "FAIL"
        outcome = "PASS" if outcome == "PASSED" else outcome
        _CRITERIA[number] = (title, outcome, report.duration)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.criterion, report.criterion_title = mark.args


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome, seconds = _CRITERIA[number]
        outcome = {"SKIPPED": "SKIP"}.get(outcome, outcome)
        terminalreporter.write_line(f"criterion {number:>2} {outcome:<4} {seconds:7.2f}s  {title}")
