import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import CIRCLE, CORPUS, INTERVAL  # noqa: E402

ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance():
    """Record one acceptance line; the summary hook prints them all."""

    def record(number: int, title: str, passed: bool, detail: str = ""):
        ACCEPTANCE[number] = (title, bool(passed), detail)
        return passed

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=sorted(CORPUS))
def corpus_measure(request):
    return request.param, CORPUS[request.param]


@pytest.fixture(params=sorted(CIRCLE))
def circle_measure(request):
    return request.param, CIRCLE[request.param]


@pytest.fixture(params=sorted(INTERVAL))
def interval_measure(request):
    return request.param, INTERVAL[request.param]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:2d}. {title}" + (f" ({detail})" if detail else ""))
