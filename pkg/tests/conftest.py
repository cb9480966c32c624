import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile(
    "default",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=0, max_value=4)
pos_dims = st.integers(min_value=1, max_value=4)

R = 0.5
SIGMA2 = 1.0 / 16.0


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def resistor():
    """The resistor state P_VI in (I, V) coordinates."""
    from gaussex import category, extgauss

    gen = category.make([[R]], extgauss.normal([0.0], [[SIGMA2]]))
    return category.name(gen)


# One line per acceptance criterion, shown at the end of every run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
