"""Metric operator built from left eigenvectors, and the ``Theta = P C`` fix.

For a real spectrum the metric is ``Theta = sum_n t_n^2 |psi^n><psi^n|``.
The scales ``t_n`` are arbitrary as far as ``Theta H = H^dagger Theta`` is
concerned; requiring ``C = P Theta`` to be an involution pins them to
``t_n = |kappa_n|^{-1/2}`` where ``P psi^n = kappa_n psi_n``.

When some eigenvalues form conjugate pairs ``E_m = conj(E_n)`` the only
Hermitian operators of this form that still intertwine ``H`` and
``H^dagger`` couple ``psi^n`` with ``psi^m``.  :func:`assemble_theta` builds
exactly that, so in the broken regime the result is indefinite and
:func:`build_metric` raises :class:`NotPositiveDefinite`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .biortho import BiorthogonalSystem
from .errors import (
    BrokenPhase,
    ComplexKappa,
    DimensionMismatch,
    InvolutivityViolated,
    NotHermitian,
    NotPositiveDefinite,
)
from .krein import (
    REALITY_TOL,
    PTClassification,
    Verdict,
    as_pseudometric,
    conjugate_partners,
)
from .matkernel import (
    POSITIVITY_FACTOR,
    as_matrix,
    dagger,
    eig_hermitian,
    fro,
    hermiticity_residual,
)

THETA_HERMITICITY_TOL = 1e-12
CERT_TOL = 1e-9
INVOLUTIVITY_TOL = 1e-9
KAPPA_TOL = 1e-8


@dataclass(frozen=True)
class MetricOperator:
    """Certified positive metric.

    ``quasi_h_residual`` is ``||Theta H - H^dagger Theta||_F / (||Theta||_F ||H||_F)``
    for the Hamiltonian the biorthogonal system was computed from.
    """

    theta: np.ndarray
    theta_inverse: np.ndarray
    scales: np.ndarray
    min_eigenvalue: float
    max_eigenvalue: float
    quasi_h_residual: float
    hermiticity_residual: float
    H: np.ndarray

    @property
    def dim(self) -> int:
        return self.theta.shape[0]

    @property
    def condition(self) -> float:
        return self.max_eigenvalue / self.min_eigenvalue

    def certified(self, tol: float = CERT_TOL) -> bool:
        return self.quasi_h_residual <= tol

    @classmethod
    def identity(cls, H) -> "MetricOperator":
        """Trivial metric, for F-space bookkeeping of arbitrary ``H``."""
        H = as_matrix(H, "H")
        n = H.shape[0]
        eye = np.eye(n, dtype=complex)
        return cls(eye, eye.copy(), np.ones(n), 1.0, 1.0, quasi_hermiticity_residual(eye, H), 0.0, H)


@dataclass(frozen=True)
class COperator:
    C: np.ndarray
    involutivity_residual: float
    commutator_residual: float | None = None


def quasi_hermiticity_residual(theta: np.ndarray, H: np.ndarray) -> float:
    scale = fro(theta) * fro(H)
    if scale == 0.0:
        return 0.0
    return fro(theta @ H - dagger(H) @ theta) / scale


def assemble_theta(sys: BiorthogonalSystem, scales=None, reality_tol: float = REALITY_TOL) -> np.ndarray:
    """``sum_n t_n t_nbar |psi^n><psi^nbar|`` with ``nbar`` the conjugate partner of ``n``.

    For a real spectrum ``nbar = n``.  No certification is done here.
    """
    n = sys.dim
    t = np.ones(n) if scales is None else np.asarray(scales, dtype=float)
    if t.shape != (n,):
        raise DimensionMismatch(f"expected {n} scales, got shape {t.shape}")
    if np.any(~(t > 0)):
        raise ValueError("scales must be strictly positive")
    partner = conjugate_partners(sys.eigenvalues, reality_tol, fro(sys.H))
    D = np.zeros((n, n))
    D[np.arange(n), partner] = t * t[partner]
    return sys.left @ D @ dagger(sys.left)


def build_metric(
    sys: BiorthogonalSystem,
    scales=None,
    reality_tol: float = REALITY_TOL,
) -> MetricOperator:
    """Assemble and certify the metric for the given per-mode scales.

    Parameters
    ----------
    sys : BiorthogonalSystem
    scales : array_like, optional
        Positive ``t_n`` applied to the left vectors; unit scales by default.
    reality_tol : float
        Relative tolerance deciding which eigenvalues count as real.

    Raises
    ------
    NotPositiveDefinite
        Minimum eigenvalue not above ``1e-10 * max eigenvalue``; always the
        case when conjugate pairs are present.
    NotHermitian
        Assembled matrix fails the ``1e-12`` Hermiticity check.
    """
    n = sys.dim
    t = np.ones(n) if scales is None else np.asarray(scales, dtype=float)
    theta = assemble_theta(sys, t, reality_tol)
    herm = hermiticity_residual(theta)
    if herm > THETA_HERMITICITY_TOL:
        raise NotHermitian(f"assembled metric is not Hermitian (residual {herm:.3g})")
    theta = 0.5 * (theta + dagger(theta))

    spec = eig_hermitian(theta)
    w = spec.eigenvalues.real
    if w.min() <= POSITIVITY_FACTOR * np.abs(w).max():
        broken = bool(np.any(np.abs(sys.eigenvalues.imag) > reality_tol * fro(sys.H)))
        hint = " (conjugate eigenvalue pairs present: broken phase)" if broken else ""
        raise NotPositiveDefinite(f"metric has minimum eigenvalue {w.min():.3g}{hint}")
    U = spec.vectors
    theta_inv = (U / w) @ dagger(U)
    theta_inv = 0.5 * (theta_inv + dagger(theta_inv))
    return MetricOperator(
        theta=theta,
        theta_inverse=theta_inv,
        scales=t,
        min_eigenvalue=float(w.min()),
        max_eigenvalue=float(w.max()),
        quasi_h_residual=quasi_hermiticity_residual(theta, sys.H),
        hermiticity_residual=herm,
        H=sys.H,
    )


def _unbroken_kappa(cls: PTClassification, kappa_tol: float) -> np.ndarray:
    if cls.verdict != Verdict.UNBROKEN:
        raise BrokenPhase("no positive metric exists: spectrum contains conjugate pairs")
    kappa = cls.proportionality_constants
    rel_imag = np.abs(kappa.imag) / np.abs(kappa)
    if np.any(rel_imag > kappa_tol):
        k = int(np.argmax(rel_imag))
        raise ComplexKappa(f"kappa_{k} = {kappa[k]:.6g} is not real (|Im|/|kappa| = {rel_imag[k]:.3g})")
    return kappa.real


def fix_pc_normalization(
    sys: BiorthogonalSystem,
    cls: PTClassification,
    P,
    method: str = "closed",
    kappa_tol: float = KAPPA_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Scales ``t_n`` and signs ``s_n`` that make ``C = P Theta(t)`` involutive.

    With ``psi^n = kappa_n P psi_n`` one has
    ``C = sum_n t_n^2 kappa_n |psi_n><psi^n|``, so ``C^2 = I`` iff
    ``t_n^2 |kappa_n| = 1``; the sign ``s_n = sign(kappa_n)`` is the
    eigenvalue of ``C`` on mode ``n``.

    ``method="minimize"`` instead fits ``log t`` by nonlinear least squares
    on ``||(P Theta(t))^2 - I||``, starting from unit scales; useful when
    the ``kappa_n`` are noisy.

    Raises
    ------
    BrokenPhase
        ``cls.verdict`` is not unbroken.
    ComplexKappa
        Some ``kappa_n`` has a relative imaginary part above ``kappa_tol``.
    """
    kappa = _unbroken_kappa(cls, kappa_tol)
    signs = np.where(kappa > 0, 1, -1)
    if method == "closed":
        return np.abs(kappa) ** -0.5, signs
    if method != "minimize":
        raise ValueError(f"unknown method {method!r}")

    P = as_pseudometric(P)
    L = sys.left
    eye = np.eye(sys.dim)

    def residual(log_t):
        C = P.P @ ((L * np.exp(2.0 * log_t)) @ dagger(L))
        R = C @ C - eye
        return np.concatenate([R.real.ravel(), R.imag.ravel()])

    fit = least_squares(residual, np.zeros(sys.dim), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return np.exp(fit.x), signs


def c_from_signs(sys: BiorthogonalSystem, signs) -> np.ndarray:
    """``sum_n s_n |psi_n><psi^n|``, the involution with prescribed mode signs."""
    s = np.asarray(signs, dtype=float)
    return (sys.right * s) @ dagger(sys.left)


def build_c_operator(
    theta: MetricOperator,
    P,
    H=None,
    tol: float = INVOLUTIVITY_TOL,
    strict: bool = True,
) -> COperator:
    """``C = P^{-1} Theta = P Theta`` together with its involutivity residual.

    Passing ``H`` also reports ``||[C, H]||_F / (||C||_F ||H||_F)``.  With
    ``strict=False`` a large involutivity residual is reported rather than
    raised.

    Raises
    ------
    InvolutivityViolated
        ``P`` is not an involution, or (strict) ``||C^2 - I||_F > tol``.
    """
    P = as_pseudometric(P)
    if P.dim != theta.dim:
        raise DimensionMismatch(f"P has dim {P.dim}, metric has dim {theta.dim}")
    if not P.is_involutive:
        raise InvolutivityViolated(f"P^2 != I (residual {P.involutivity_residual:.3g})")
    C = P.P @ theta.theta
    resid = fro(C @ C - np.eye(theta.dim))
    if strict and resid > tol:
        raise InvolutivityViolated(f"||C^2 - I|| = {resid:.3g} exceeds {tol:g}; metric normalization not fixed")
    comm = None
    if H is not None:
        H = as_matrix(H, "H")
        scale = fro(C) * fro(H)
        comm = fro(C @ H - H @ C) / scale if scale else 0.0
    return COperator(C, resid, comm)


def s_adjoint(X, theta: MetricOperator) -> np.ndarray:
    """Metric-mediated conjugate ``Theta^{-1} X^dagger Theta``."""
    X = as_matrix(X, "X")
    if X.shape[0] != theta.dim:
        raise DimensionMismatch(f"X has dim {X.shape[0]}, metric has dim {theta.dim}")
    return theta.theta_inverse @ dagger(X) @ theta.theta


def observable_compatibility(observables, theta: MetricOperator) -> list[float]:
    """Relative quasi-Hermiticity residual of each operator against ``theta``."""
    out = []
    for j, X in enumerate(observables):
        X = as_matrix(X, f"observable {j}")
        if X.shape[0] != theta.dim:
            raise DimensionMismatch(f"observable {j} has dim {X.shape[0]}, metric has dim {theta.dim}")
        out.append(quasi_hermiticity_residual(theta.theta, X))
    return out


def quasi_hermitian_observable(theta: MetricOperator, K) -> np.ndarray:
    """``Theta^{-1} K`` for Hermitian ``K``: self-adjoint in the metric ``theta``."""
    K = as_matrix(K, "K")
    if hermiticity_residual(K) > 1e-12:
        raise NotHermitian("K must be Hermitian")
    return theta.theta_inverse @ K
