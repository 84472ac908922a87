"""Krein-space pseudometric and the unbroken/broken classification.

A Hamiltonian is ``P``-self-adjoint when ``H^dagger P = P H``.  Then
``P^{-1}`` maps each left eigenvector ``psi^n`` to a right eigenvector of
``H`` with eigenvalue ``conj(E_n)``: either back onto ``psi_n`` (real
``E_n``) or onto the partner ``psi_m`` with ``E_m = conj(E_n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .biortho import BiorthogonalSystem
from .errors import (
    DimensionMismatch,
    NotHermitian,
    PairingNotFound,
    ProportionalityViolated,
    PseudoHermiticityViolated,
    QuasiHermError,
)
from .matkernel import as_matrix, dagger, eig_hermitian, fro, hermiticity_residual

PSEUDOMETRIC_TOL = 1e-12
REALITY_TOL = 1e-9
PSEUDO_HERMITICITY_TOL = 1e-9
PROPORTIONALITY_TOL = 1e-6


class SingularPseudometric(QuasiHermError):
    pass


class Verdict(str, Enum):
    UNBROKEN = "Unbroken"
    BROKEN = "Broken"
    EXCEPTIONAL_POINT = "ExceptionalPoint"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Pseudometric:
    """Hermitian, invertible (generally indefinite) metric ``P``."""

    P: np.ndarray
    hermiticity_residual: float
    involutivity_residual: float
    signature: tuple[int, int]
    inverse: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, P, tol: float = PSEUDOMETRIC_TOL) -> "Pseudometric":
        P = as_matrix(P, "P")
        herm = hermiticity_residual(P)
        if herm > tol:
            raise NotHermitian(f"pseudometric is not Hermitian (residual {herm:.3g})")
        P = 0.5 * (P + dagger(P))
        n = P.shape[0]
        w = eig_hermitian(P).eigenvalues.real
        if np.abs(w).min() <= 1e-12 * np.abs(w).max():
            raise SingularPseudometric("pseudometric is singular")
        invol = fro(P @ P - np.eye(n))
        # P^2 = I makes P its own inverse
        inverse = P.copy() if invol <= tol else np.linalg.inv(P)
        return cls(P, herm, invol, (int((w > 0).sum()), int((w < 0).sum())), inverse)

    @property
    def dim(self) -> int:
        return self.P.shape[0]

    @property
    def is_involutive(self) -> bool:
        return self.involutivity_residual <= PSEUDOMETRIC_TOL


def as_pseudometric(P) -> Pseudometric:
    return P if isinstance(P, Pseudometric) else Pseudometric.from_matrix(P)


@dataclass(frozen=True)
class PTClassification:
    """Outcome of :func:`classify_pt`.

    ``pairing`` maps each broken mode ``n`` to its partner ``m``;
    ``proportionality_constants[n]`` is ``kappa_n`` with
    ``P^{-1} psi^n = kappa_n psi_n`` for real modes and NaN otherwise.
    ``partner_constants`` holds the analogous constant against ``psi_m``
    for broken modes.
    """

    verdict: Verdict
    real_flags: np.ndarray
    pairing: dict[int, int]
    proportionality_constants: np.ndarray
    partner_constants: np.ndarray
    residuals: np.ndarray
    pseudo_hermiticity_residual: float
    max_imag: float

    @property
    def kappa(self) -> np.ndarray:
        return self.proportionality_constants


def pseudo_hermiticity_residual(H, P) -> float:
    """``||H^dagger P - P H||_F / (||P||_F ||H||_F)``."""
    H = as_matrix(H, "H")
    P = as_pseudometric(P)
    if H.shape != P.P.shape:
        raise DimensionMismatch(f"H has shape {H.shape}, P has shape {P.P.shape}")
    scale = fro(P.P) * fro(H)
    if scale == 0.0:
        return 0.0
    return fro(dagger(H) @ P.P - P.P @ H) / scale


def conjugate_partners(eigenvalues: np.ndarray, reality_tol: float, scale: float) -> np.ndarray:
    """Index of the eigenvalue nearest ``conj(E_n)``: ``n`` itself for real modes.

    Raises
    ------
    PairingNotFound
        If a non-real eigenvalue has no distinct partner, or the map is not
        an involution.
    """
    E = np.asarray(eigenvalues)
    n = len(E)
    real = np.abs(E.imag) <= reality_tol * scale
    partner = np.arange(n)
    for k in np.flatnonzero(~real):
        d = np.abs(np.conj(E[k]) - E)
        d[k] = np.inf
        m = int(np.argmin(d))
        if real[m] or d[m] > max(1e-6 * (abs(E[k]) + scale), reality_tol * scale):
            raise PairingNotFound(f"no conjugate partner for E_{k} = {E[k]:.6g}")
        partner[k] = m
    if np.any(partner[partner] != np.arange(n)):
        raise PairingNotFound("conjugate pairing is not an involution")
    return partner


def _fit(target: np.ndarray, basis: np.ndarray) -> tuple[complex, float]:
    kappa = np.vdot(basis, target) / np.vdot(basis, basis)
    denom = np.linalg.norm(target)
    resid = np.linalg.norm(target - kappa * basis) / (denom if denom > 0 else 1.0)
    return complex(kappa), float(resid)


def classify_pt(
    H,
    P,
    sys: BiorthogonalSystem,
    reality_tol: float = REALITY_TOL,
    proportionality_tol: float = PROPORTIONALITY_TOL,
    pseudo_tol: float = PSEUDO_HERMITICITY_TOL,
) -> PTClassification:
    """Decide unbroken versus broken symmetry from the biorthogonal system.

    Every mode ends up either real with a proportionality constant
    ``kappa_n``, or in exactly one broken pair ``n <-> m``.

    Raises
    ------
    PseudoHermiticityViolated
        ``H`` is not ``P``-self-adjoint to ``pseudo_tol``.
    ProportionalityViolated
        ``P^{-1} psi^n`` is not parallel to the expected right vector.
    PairingNotFound
        A non-real eigenvalue has no conjugate partner in the spectrum.
    """
    H = as_matrix(H, "H")
    P = as_pseudometric(P)
    if H.shape[0] != sys.dim:
        raise DimensionMismatch(f"H has dim {H.shape[0]}, system has dim {sys.dim}")
    phr = pseudo_hermiticity_residual(H, P)
    if phr > pseudo_tol:
        raise PseudoHermiticityViolated(f"||H^+P - PH|| residual {phr:.3g} exceeds {pseudo_tol:g}")

    n = sys.dim
    E = sys.eigenvalues
    scale = fro(H)
    partner = conjugate_partners(E, reality_tol, scale)
    real_flags = partner == np.arange(n)
    phi = P.inverse @ sys.left

    kappa = np.full(n, np.nan + 1j * np.nan)
    partner_const = np.full(n, np.nan + 1j * np.nan)
    residuals = np.zeros(n)
    pairing: dict[int, int] = {}
    for k in range(n):
        m = int(partner[k])
        c, r = _fit(phi[:, k], sys.right[:, m])
        residuals[k] = r
        if r > proportionality_tol:
            raise ProportionalityViolated(
                f"P^-1 psi^{k} is not parallel to psi_{m} (residual {r:.3g})"
            )
        if m == k:
            kappa[k] = c
        else:
            partner_const[k] = c
            pairing[k] = m

    verdict = Verdict.UNBROKEN if real_flags.all() else Verdict.BROKEN
    return PTClassification(
        verdict=verdict,
        real_flags=real_flags,
        pairing=pairing,
        proportionality_constants=kappa,
        partner_constants=partner_const,
        residuals=residuals,
        pseudo_hermiticity_residual=phr,
        max_imag=float(np.abs(E.imag).max()),
    )
