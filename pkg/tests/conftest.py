import numpy as np
import pytest

from hetnet_cs.scenario import build_default_scenario, draw_channel

# (criterion, passed, detail) lines collected by test_acceptance.py
ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def scenario():
    return build_default_scenario(alpha=0.5, p_min_dbm=-70.0, seed=7)


@pytest.fixture(scope="session")
def snapshot(scenario):
    return draw_channel(scenario)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
