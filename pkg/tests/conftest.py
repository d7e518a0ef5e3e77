import os

import pytest
from hypothesis import HealthCheck, settings

from stationary_light.medium import MediumParams, derive

# Fixed-seed profile by default; `pytest --hypothesis-seed=N` or
# HYPOTHESIS_PROFILE=random switch to other streams.
settings.register_profile(
    "default", derandomize=True, deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("random", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def medium():
    """Cold-atom slab used throughout: 0.8 um, n - 1 = 1.2e-2, 1e14 cm^-3, 300 um."""
    return MediumParams(wavelength=0.8e-6, gamma=1.9e7, density=1e20, length=300e-6, n_s=1.012, n_c=1.0)


@pytest.fixture(scope="session")
def derived(medium):
    return derive(medium)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[_ACCEPTANCE_KEY]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance table")
        for line in lines:
            terminalreporter.write_line(line)
