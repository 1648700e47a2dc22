import os
import random

import pytest
from hypothesis import HealthCheck, settings

from monofix.coeff_field import TowerField

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE: list = []


@pytest.fixture
def field():
    return TowerField()


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def record():
    """Collects one acceptance line per criterion for the terminal summary."""
    def add(number, name, passed, detail):
        ACCEPTANCE.append((number, name, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name}: {detail}")
    return add


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number}. {name}: {detail}")
