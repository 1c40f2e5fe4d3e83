from __future__ import annotations

import math
import warnings

import pytest
from hypothesis import HealthCheck, settings

from orisqkd.scenario import Scenario

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def scenario() -> Scenario:
    return Scenario()


@pytest.fixture(scope="session")
def link_at(scenario):
    """Cached angle-resolved link states, keyed by incident zenith in degrees."""
    cache = {}

    def get(phi_deg: float):
        if phi_deg not in cache:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                cache[phi_deg] = scenario.at(math.radians(phi_deg))
        return cache[phi_deg]

    return get


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance verdicts after the run, one line per criterion."""
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
