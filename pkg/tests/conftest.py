import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import pytest

from momentbox.ingest import moments_closed_form


@pytest.fixture(scope="session")
def uniform01():
    return moments_closed_form("uniform", 0, 1, max_degree=21)


@pytest.fixture(scope="session")
def beta25():
    return moments_closed_form("beta", 2, 5, max_degree=21)


@pytest.fixture(scope="session")
def std_normal():
    return moments_closed_form("gaussian", 0, 1, max_degree=21)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture
def record():
    def _record(number, passed, detail):
        ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} ({detail})")
