import numpy as np
import pytest

from infostab.equation import OpenTriangleSampler


@pytest.fixture(scope="session")
def sampler():
    return OpenTriangleSampler(count=20_000, margin=1e-4, seed=0)


@pytest.fixture(scope="session")
def small_sampler():
    return OpenTriangleSampler(count=4_000, margin=1e-4, seed=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])
