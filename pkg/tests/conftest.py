import numpy as np
import pytest

from ringcav.params import SystemParams


@pytest.fixture
def optimal6():
    """Trap frequency 6, tuned to the lower sideband, U0 = 0.01, recoil 0.01."""
    return SystemParams.from_trap_frequency(6.0, -6.0, 0.01, 0.01)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
