import sys

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from quasiherm.models import model_chain, model_pt2
from quasiherm.pipeline import analyze


def match_distance(a, b):
    """Largest distance under the optimal one-to-one matching of two multisets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    D = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(D)
    return D[r, c].max()


def random_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def cell():
    """Unbroken 2x2 cell a=0.6, b=1.0 run through the whole pipeline."""
    H, P = model_pt2(0.6, 1.0)
    return analyze(H, P)


@pytest.fixture(scope="session")
def chain6():
    H, P = model_chain(6, 0.55, 1.0)
    return analyze(H, P)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.format_line(k))
