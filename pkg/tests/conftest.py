import numpy as np
import pytest
from scipy.signal import lfilter

from stscale.stats import VideoStats


def typical(sigma_v2=2300.0, rho=0.95, qvar=250.0, size=720, fps=50.0):
    return VideoStats(sigma_v2, rho, rho, qvar, size, size, fps)


def ar1_frames(n, h, w, rho, var, seed, burn=64):
    """Independent frames of a separable first-order Markov field."""
    rng = np.random.default_rng(seed)
    e = rng.standard_normal((n, h + burn, w + burn))
    g = np.sqrt(1.0 - rho * rho)
    x = lfilter([g], [1.0, -rho], e, axis=2)
    x = lfilter([g], [1.0, -rho], x, axis=1)
    return x[:, burn:, burn:] * np.sqrt(var)


@pytest.fixture
def typical_stats():
    return typical()


# acceptance lines are gathered here and echoed in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
