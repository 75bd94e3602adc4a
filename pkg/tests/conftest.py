import sys
from fractions import Fraction

import pytest
from hypothesis import settings

from gnedin.model import ModelParams

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

GAMMAS = (Fraction(3, 10), Fraction(1, 2), Fraction(7, 10))


@pytest.fixture(params=GAMMAS, ids=lambda g: f"g={g}")
def params(request):
    return ModelParams(request.param)


@pytest.fixture
def half():
    return ModelParams(Fraction(1, 2))


def pytest_terminal_summary(terminalreporter):
    """Print one PASS/FAIL line per acceptance criterion that ran."""
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
