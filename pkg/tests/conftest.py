import warnings

import numpy as np
import pytest

from halfline_nls import Grid1D, GridFunction


@pytest.fixture
def line_grid():
    return Grid1D(-20.0, 20.0, 1025)


@pytest.fixture
def half_grid():
    return Grid1D.half_line(20.0, 512)


@pytest.fixture
def gaussian(line_grid):
    return GridFunction(line_grid, np.exp(-line_grid.points**2) + 0j)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _quiet_truncation():
    from halfline_nls import TruncationWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        yield


ACCEPTANCE_COUNT = 9


def pytest_configure(config):
    config.acceptance_lines = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, ACCEPTANCE_COUNT + 1):
        terminalreporter.write_line(lines.get(n, f"criterion {n}: FAIL (did not complete)"))


@pytest.fixture
def acceptance(request):
    """``acceptance(n, ok, detail)`` records one pass/fail line and asserts ``ok``."""

    def record(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
        request.config.acceptance_lines[n] = line
        print(line)
        assert ok, line

    return record
