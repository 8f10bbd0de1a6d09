import numpy as np
import pytest
from hypothesis import settings

from mfdecomp.dfa import DfaConfig, log_scale_grid
from mfdecomp.series import ReturnSeries

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture
def small_config():
    """A cheap configuration for series of a few thousand points."""
    return DfaConfig(s_grid=log_scale_grid(16, 400, 12), n_boxes=300, seed=3)


@pytest.fixture
def gaussian_series():
    return ReturnSeries(np.random.default_rng(12345).standard_normal(4096))


# -- acceptance summary: one line per criterion ----------------------------------

_OUTCOMES: dict[int, list[str]] = {}
_DETAILS: dict[int, list[str]] = {}
_TITLES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _TITLES[m.args[0]] = m.args[1]


def pytest_runtest_logreport(report):
    crit = _CRIT_OF.get(report.nodeid)
    if crit is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _OUTCOMES.setdefault(crit, []).append(report.outcome)


_CRIT_OF: dict[str, int] = {}


def pytest_itemcollected(item):
    m = item.get_closest_marker("criterion")
    if m:
        _CRIT_OF[item.nodeid] = m.args[0]


@pytest.fixture
def report(request):
    """Attach a measured-value note to the current test's criterion line."""
    crit = request.node.get_closest_marker("criterion").args[0]
    return lambda text: _DETAILS.setdefault(crit, []).append(text)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_OUTCOMES):
        outs = _OUTCOMES[crit]
        if "failed" in outs:
            status = "FAIL"
        elif all(o == "skipped" for o in outs):
            status = "SKIP"
        else:
            status = "PASS"
        details = "; ".join(_DETAILS.get(crit, []))
        tr.write_line(f"criterion {crit:>2} {status}  {_TITLES.get(crit, '')}" + (f"  [{details}]" if details else ""))
