"""Paired right/left eigenproblems and biorthonormal normalization.

Right vectors solve ``H psi_n = E_n psi_n``; left vectors are the right
eigenvectors of ``H^dagger`` for ``conj(E_n)``.  Right vectors keep unit
norm, left vectors are rescaled so that ``<psi^n, psi_m> = delta_nm``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, PairingAmbiguous
from .matkernel import as_matrix, dagger, default_tol_eig, eig_general, fro

AMBIGUITY_FACTOR = 1e-8


@dataclass(frozen=True)
class BiorthogonalSystem:
    """Biorthonormal eigensystem of ``H``.

    Attributes
    ----------
    H : ndarray
        The Hamiltonian the system was computed for.
    eigenvalues : ndarray
        ``E_n``, sorted by (real, imaginary) part.
    right, left : ndarray
        Column ``n`` holds ``psi_n`` and ``psi^n`` respectively.
    left_eigenvalues : ndarray
        Eigenvalues of ``H^dagger`` attached to the left columns; equal to
        ``conj(eigenvalues)`` up to solver accuracy.
    pairing_residuals : ndarray
        ``max(||H psi_n - E_n psi_n||, ||H^dagger psi^n - E_n^* psi^n|| / ||psi^n||)``.
    gram_residual : float
        ``max |<psi^n, psi_m> - delta_nm|``.
    tol_eig : float
        Eigen-residual tolerance used by the solves.
    """

    H: np.ndarray
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    left_eigenvalues: np.ndarray
    pairing_residuals: np.ndarray
    gram_residual: float
    tol_eig: float

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def gram(self) -> np.ndarray:
        return dagger(self.left) @ self.right

    def resolution_of_identity(self) -> np.ndarray:
        """``sum_n |psi_n><psi^n|``."""
        return self.right @ dagger(self.left)


def _match_conjugates(values: np.ndarray, left_values: np.ndarray, threshold: float) -> np.ndarray:
    """Greedy nearest-conjugate assignment ``n -> m`` with ``conj(E_n) ~ F_m``."""
    n = len(values)
    D = np.abs(np.conj(values)[:, None] - left_values[None, :])
    assignment = np.full(n, -1)
    free_rows = set(range(n))
    free_cols = set(range(n))
    while free_rows:
        rows = sorted(free_rows)
        cols = sorted(free_cols)
        sub = D[np.ix_(rows, cols)]
        i, j = np.unravel_index(np.argmin(sub), sub.shape)
        r, c = rows[i], cols[j]
        if len(cols) > 1:
            runner_up = np.partition(sub[i], 1)[1]
            if runner_up - sub[i, j] <= threshold:
                raise PairingAmbiguous(
                    f"conj(E_{r}) = {np.conj(values[r]):.6g} is equally near two left eigenvalues"
                )
        if sub[i, j] > max(threshold, 1e-6 * (1.0 + abs(values[r]))):
            raise PairingAmbiguous(
                f"no left eigenvalue matches conj(E_{r}) = {np.conj(values[r]):.6g} "
                f"(nearest distance {sub[i, j]:.3g})"
            )
        assignment[r] = c
        free_rows.discard(r)
        free_cols.discard(c)
    return assignment


def solve_biorthogonal(H, tol_eig: float | None = None) -> BiorthogonalSystem:
    """Solve the right and left eigenproblems of ``H`` and biorthonormalize.

    Raises
    ------
    DegenerateSpectrum
        From the eigensolver, when two eigenvalues cluster.
    PairingAmbiguous
        When a left eigenvalue cannot be matched uniquely to ``conj(E_n)``.
    """
    H = as_matrix(H, "H")
    if tol_eig is None:
        tol_eig = default_tol_eig(H)
    right = eig_general(H, tol_eig)
    left = eig_general(dagger(H), tol_eig)

    threshold = AMBIGUITY_FACTOR * fro(H)
    m = _match_conjugates(right.eigenvalues, left.eigenvalues, threshold)
    L = left.vectors[:, m].copy()
    R = right.vectors
    overlaps = np.einsum("ij,ij->j", L.conj(), R)
    L /= overlaps.conj()

    E = right.eigenvalues
    right_res = np.linalg.norm(H @ R - R * E, axis=0)
    left_res = np.linalg.norm(dagger(H) @ L - L * E.conj(), axis=0) / np.linalg.norm(L, axis=0)
    gram_dev = float(np.abs(dagger(L) @ R - np.eye(len(E))).max())
    return BiorthogonalSystem(
        H=H,
        eigenvalues=E,
        right=R,
        left=L,
        left_eigenvalues=left.eigenvalues[m],
        pairing_residuals=np.maximum(right_res, left_res),
        gram_residual=gram_dev,
        tol_eig=tol_eig,
    )


def biortho_residual(H, sys: BiorthogonalSystem) -> float:
    """Recompute the certificate of ``sys`` against ``H``.

    Returns the largest of the per-mode eigen-residuals (right, and left
    divided by the left-vector norm) and ``||H||_F`` times the Gram
    deviation, so every term carries units of energy.
    """
    H = as_matrix(H, "H")
    if H.shape[0] != sys.dim:
        raise DimensionMismatch(f"H has dim {H.shape[0]}, system has dim {sys.dim}")
    E, R, L = sys.eigenvalues, sys.right, sys.left
    right_res = np.linalg.norm(H @ R - R * E, axis=0)
    lnorm = np.linalg.norm(L, axis=0)
    lnorm[lnorm == 0.0] = 1.0
    left_res = np.linalg.norm(dagger(H) @ L - L * E.conj(), axis=0) / lnorm
    gram_dev = np.abs(dagger(L) @ R - np.eye(sys.dim)).max()
    return float(max(right_res.max(), left_res.max(), fro(H) * gram_dev))
