import os
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> printed line, filled in by test_acceptance
ACCEPTANCE_LINES = {}


def record_criterion(n, passed, detail):
    line = f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture(scope="session")
def series60():
    from negdim.series import series_generate
    t0 = time.perf_counter()
    table = series_generate(K=60)
    table.seconds = time.perf_counter() - t0
    return table


@pytest.fixture(scope="session")
def root_sweep(series60):
    """Certified root sets of E^(k)(D) for k = 5..60, plus total seconds."""
    from negdim.roots import find_all_roots
    t0 = time.perf_counter()
    sets = {k: find_all_roots(series60.terms[k], k=k) for k in range(5, 61)}
    return sets, time.perf_counter() - t0
