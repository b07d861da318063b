import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=150,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def two_blobs(n_per_class=20, d=2, gap=6.0, seed=0):
    """Two Gaussian clouds whose margin is far above 1 (separable by construction)."""
    rng = np.random.default_rng(seed)
    X0 = rng.normal(0.0, 0.5, size=(n_per_class, d))
    X1 = rng.normal(0.0, 0.5, size=(n_per_class, d))
    X0[:, 0] -= gap / 2
    X1[:, 0] += gap / 2
    # clip so the margin is guaranteed, not just likely
    X0[:, 0] = np.minimum(X0[:, 0], -1.0)
    X1[:, 0] = np.maximum(X1[:, 0], 1.0)
    X = np.vstack([X0, X1])
    y = np.r_[np.zeros(n_per_class, dtype=int), np.ones(n_per_class, dtype=int)]
    return X, y


@pytest.fixture
def blobs():
    return two_blobs()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    """Print one PASS/FAIL line per acceptance criterion that ran."""
    module = sys.modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        terminalreporter.write_line(verdicts[number])
