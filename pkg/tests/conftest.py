import os

import numpy as np
import pytest
from hypothesis import settings

from dmgwalk.testbench import FIG1, FIG1B, FOUR

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("thorough", max_examples=1000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def fig1():
    return FIG1


@pytest.fixture
def fig1b():
    return FIG1B


@pytest.fixture
def four():
    return FOUR


@pytest.fixture
def rng():
    return np.random.default_rng(int(os.environ.get("DMG_SEED", "12345")))


def pytest_configure(config):
    config.acceptance_lines = {}


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
