import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from twoclosure.zoo import corpus as _corpus  # noqa: E402

_CRITERIA = {}


@pytest.fixture(scope="session")
def corpus():
    return _corpus()


@pytest.fixture
def criterion():
    """criterion(k, ok, detail) records one acceptance line; returns ok."""
    def record(k, ok, detail=""):
        _CRITERIA[k] = (ok, detail)
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        ok, detail = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
