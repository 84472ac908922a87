"""Dyson map ``Omega`` with ``Omega^dagger Omega = Theta`` and hermitization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, HermitizationFailed
from .matkernel import EPS, as_matrix, check_positive, dagger, eig_hermitian, fro
from .metric import CERT_TOL, MetricOperator, quasi_hermiticity_residual


@dataclass(frozen=True)
class DysonMap:
    """Principal Hermitian root ``Omega = Theta^{1/2}`` and its inverse.

    ``factorization_residual`` is ``||Omega^dagger Omega - Theta||_F``;
    ``condition`` is the 2-norm condition number of ``Omega``.
    """

    omega: np.ndarray
    omega_inverse: np.ndarray
    factorization_residual: float
    inverse_residual: float
    condition: float
    theta: np.ndarray

    @property
    def dim(self) -> int:
        return self.omega.shape[0]


def dyson_from_metric(theta: MetricOperator) -> DysonMap:
    """Build ``Omega = Theta^{1/2}`` from one Hermitian eigendecomposition.

    Raises
    ------
    NotPositiveDefinite
        If ``theta`` is not positive definite.
    """
    T = theta.theta
    spec = eig_hermitian(T)
    w = spec.eigenvalues.real
    check_positive(w)
    U = spec.vectors
    root = np.sqrt(w)
    omega = (U * root) @ dagger(U)
    omega = 0.5 * (omega + dagger(omega))
    omega_inv = (U / root) @ dagger(U)
    omega_inv = 0.5 * (omega_inv + dagger(omega_inv))
    n = T.shape[0]
    return DysonMap(
        omega=omega,
        omega_inverse=omega_inv,
        factorization_residual=fro(dagger(omega) @ omega - T),
        inverse_residual=fro(omega @ omega_inv - np.eye(n)),
        condition=float(root.max() / root.min()),
        theta=T,
    )


def hermitization_tolerance(H: np.ndarray, d: DysonMap, quasi_h: float) -> float:
    """Bound on ``||h - h^dagger||_F / ||H||_F`` for ``h = Omega H Omega^{-1}``.

    ``h - h^dagger = Omega^{-1} (Theta H - H^dagger Theta) Omega^{-1}``, so the
    quasi-Hermiticity residual is amplified by ``cond(Theta)``; rounding in
    the two products contributes ``n eps cond(Omega)``.
    """
    n = d.dim
    return 10.0 * (np.sqrt(n) * d.condition**2 * quasi_h + n * EPS * d.condition)


def hermitize(H, d: DysonMap, tol_cert: float = CERT_TOL) -> np.ndarray:
    """Return ``h = Omega H Omega^{-1}``, Hermitian when ``H`` is quasi-Hermitian.

    The returned matrix is not symmetrized, so callers can measure its
    Hermiticity themselves.

    Raises
    ------
    HermitizationFailed
        ``H`` is not quasi-Hermitian to ``tol_cert`` with respect to
        ``Omega^dagger Omega``, or ``h`` misses the derived tolerance.
    """
    H = as_matrix(H, "H")
    if H.shape[0] != d.dim:
        raise DimensionMismatch(f"H has dim {H.shape[0]}, Dyson map has dim {d.dim}")
    quasi_h = quasi_hermiticity_residual(d.theta, H)
    if quasi_h > tol_cert:
        raise HermitizationFailed(f"H is not quasi-Hermitian for this metric (residual {quasi_h:.3g})")
    h = d.omega @ H @ d.omega_inverse
    scale = fro(H)
    if scale == 0.0:
        return h
    resid = fro(h - dagger(h)) / scale
    tol = hermitization_tolerance(H, d, quasi_h)
    if resid > tol:
        raise HermitizationFailed(f"Hermiticity residual {resid:.3g} exceeds derived tolerance {tol:.3g}")
    return h


def map_state(psi, d: DysonMap) -> np.ndarray:
    """Image ``Omega psi`` of a state in the physical Dyson-image space."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (d.dim,):
        raise DimensionMismatch(f"state has shape {psi.shape}, expected ({d.dim},)")
    return d.omega @ psi
