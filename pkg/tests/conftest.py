import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")

_criteria_key = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_criteria_key] = {}


@pytest.fixture
def fixture_path():
    return lambda name: os.path.join(FIXTURES, name)


@pytest.fixture
def record_criterion(request):
    """record_criterion(number, title, passed, detail) -> one line in the summary."""
    table = request.config.stash[_criteria_key]

    def record(number, title, passed, detail=""):
        table[number] = (title, bool(passed), detail)
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}"
        print(line + (f"  [{detail}]" if detail else ""))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash.get(_criteria_key, {})
    if not table:
        return
    terminalreporter.section("acceptance criteria (exact, zero tolerance)")
    for number in sorted(table):
        title, passed, detail = table[number]
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
