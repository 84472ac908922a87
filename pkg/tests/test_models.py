import math

import numpy as np
import pytest

from quasiherm.errors import InvalidGrid
from quasiherm.models import (
    ModelSpec,
    exchange,
    model_chain,
    model_pt2,
    random_unbroken_instance,
    sweep_phase_diagram,
    sweep_point,
)


def numpy_is_real(H, tol=1e-9):
    return np.abs(np.linalg.eigvals(H).imag).max() <= tol * np.linalg.norm(H)


def bisect_threshold(n, coupling=1.0, lo=0.0, hi=4.0, iters=60):
    """First gamma at which numpy's spectrum of the chain leaves the real axis."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if numpy_is_real(model_chain(n, mid, coupling)[0], tol=1e-6):
            lo = mid
        else:
            hi = mid
    return hi


def test_model_shapes():
    H, P = model_pt2(0.5, 2.0)
    np.testing.assert_array_equal(H, [[0.5j, 2], [2, -0.5j]])
    np.testing.assert_array_equal(P.P, [[0, 1], [1, 0]])
    H, P = model_chain(4, 0.3, 1.5)
    assert H[0, 0] == 0.3j and H[3, 3] == -0.3j and H[1, 2] == 1.5
    np.testing.assert_array_equal(exchange(3), np.eye(3)[::-1])


def test_model_validation():
    with pytest.raises(ValueError):
        model_pt2(0.1, 0.0)
    with pytest.raises(ValueError):
        ModelSpec("GainLossChain", {"n": 2.5, "gamma": 0.1, "coupling": 1.0})
    with pytest.raises(ValueError):
        ModelSpec("Nope", {})
    with pytest.raises(ValueError):
        ModelSpec("PT2Cell", {"a": 1.0})


def test_sweep_order_and_verdicts():
    rows = sweep_phase_diagram("PT2Cell", {"a": [1.5, 0.0, 1.0, 0.5], "b": [1.0]})
    assert [r.params["a"] for r in rows] == [0.0, 0.5, 1.0, 1.5]
    assert [r.verdict for r in rows] == ["Unbroken", "Unbroken", "ExceptionalPoint", "Broken"]
    assert rows[0].min_theta_eigenvalue > 0
    assert rows[3].min_theta_eigenvalue < 0
    assert math.isnan(rows[2].min_theta_eigenvalue)
    assert rows[3].max_im_E == pytest.approx(math.sqrt(1.25), abs=1e-12)


def test_sweep_bad_grids():
    with pytest.raises(InvalidGrid):
        sweep_phase_diagram("Nope", {})
    with pytest.raises(InvalidGrid):
        sweep_phase_diagram("PT2Cell", {"a": [0.1]})
    with pytest.raises(InvalidGrid):
        sweep_phase_diagram("PT2Cell", {"a": [], "b": [1.0]})
    with pytest.raises(InvalidGrid):
        sweep_phase_diagram("PT2Cell", {"a": [0.1], "b": [-1.0]})


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_chain_threshold_against_bisection(n):
    g_star = bisect_threshold(n)
    # even chains break at gamma = coupling, odd chains strictly later
    if n % 2 == 0:
        assert g_star == pytest.approx(1.0, abs=1e-3)
    else:
        assert g_star > 1.05
    below = sweep_point(ModelSpec("GainLossChain", {"n": n, "gamma": 0.97 * g_star, "coupling": 1.0}))
    above = sweep_point(ModelSpec("GainLossChain", {"n": n, "gamma": 1.03 * g_star, "coupling": 1.0}))
    assert below.verdict == "Unbroken"
    assert above.verdict == "Broken"


def test_random_instances_are_unbroken():
    rng = np.random.default_rng(7)
    for _ in range(60):
        spec = random_unbroken_instance(rng)
        H, _ = spec.build()
        assert numpy_is_real(H)
        assert 2 <= H.shape[0] <= 12
