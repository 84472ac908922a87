import numpy as np
import pytest

from quasiherm.dyson import dyson_from_metric, hermitize, map_state
from quasiherm.errors import DimensionMismatch, HermitizationFailed
from quasiherm.metric import MetricOperator
from quasiherm.models import model_chain, random_unbroken_instance
from quasiherm.pipeline import analyze

from conftest import match_distance, random_complex


def test_cell_partner(cell):
    d = cell.dyson
    assert d.factorization_residual < 1e-13
    assert d.inverse_residual < 1e-13
    h = cell.h
    assert np.linalg.norm(h - h.conj().T) < 1e-13
    np.testing.assert_allclose(np.linalg.eigvalsh(0.5 * (h + h.conj().T)), [-0.8, 0.8], atol=1e-13)
    np.testing.assert_allclose(d.omega, d.omega.conj().T)
    assert np.linalg.eigvalsh(d.omega).min() > 0
    # Omega^2 = Theta with eigenvalues 0.5 and 2
    assert d.condition == pytest.approx(2.0, rel=1e-12)


def test_isospectral_chain(chain6):
    ref = np.linalg.eigvals(chain6.H)
    assert match_distance(chain6.h_eigenvalues, ref) < 1e-12


def test_inner_product_transport(rng, chain6):
    d = chain6.dyson
    T = chain6.metric.theta
    for _ in range(50):
        phi, psi = random_complex(rng, 6), random_complex(rng, 6)
        lhs = np.vdot(map_state(phi, d), map_state(psi, d))
        rhs = np.vdot(phi, T @ psi)
        assert abs(lhs - rhs) <= 1e-12 * np.linalg.norm(phi) * np.linalg.norm(psi) * np.linalg.norm(T)


def test_hermitize_rejects_wrong_metric():
    H, _ = model_chain(4, 0.5, 1.0)
    d = dyson_from_metric(MetricOperator.identity(H))
    with pytest.raises(HermitizationFailed):
        hermitize(H, d)
    with pytest.raises(DimensionMismatch):
        hermitize(np.eye(3), d)
    with pytest.raises(DimensionMismatch):
        map_state(np.ones(3), d)


def test_random_instances(rng):
    for _ in range(20):
        H, P = random_unbroken_instance(rng).build()
        a = analyze(H, P)
        h = a.h
        assert np.linalg.norm(h - h.conj().T) / np.linalg.norm(H) <= 1e-9
        assert match_distance(a.h_eigenvalues, np.linalg.eigvals(H)) <= 1e-9 * np.linalg.norm(H)
