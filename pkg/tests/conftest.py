import numpy as np
import pytest

from hera import ConfidenceState, Hyperparams, PartialLabelDataset
from hera.data import gaussian_blobs

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_problem(rng, d=None, q=None, n=None):
    """Random dataset, weights and full confidence state with entries in [-1, 1]."""
    d = d or int(rng.integers(1, 7))
    q = q or int(rng.integers(2, 7))
    n = n or int(rng.integers(1, 7))
    X = rng.uniform(-1, 1, (d, n))
    Y = (rng.random((q, n)) < 0.5).astype(np.uint8)
    Y[rng.integers(0, q, n), np.arange(n)] = 1
    ds = PartialLabelDataset(X, Y)
    W = rng.uniform(-1, 1, (d, q))
    cs = ConfidenceState(*(rng.uniform(-1, 1, (q, n)) for _ in range(5)))
    hp = Hyperparams(alpha=float(rng.uniform(0.1, 1)), beta=float(rng.uniform(0.1, 1)),
                     mu=float(rng.uniform(0.1, 1)), nu=float(rng.uniform(0.1, 1)))
    lam, rho = (float(v) for v in rng.uniform(0.1, 1, 2))
    return ds, W, cs, hp, lam, rho


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture(scope="session")
def blobs60():
    return gaussian_blobs(60, 5, 3, 6.0, seed=0)
