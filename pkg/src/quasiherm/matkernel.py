"""Dense complex linear-algebra kernel.

Everything downstream (biorthogonal eigensystems, metrics, Dyson maps,
propagators) is built on the handful of routines here:

* :func:`eig_general`: Householder reduction to Hessenberg form followed by
  explicitly shifted complex QR iteration (Wilkinson shifts, deflation) and
  back substitution on the Schur factor.
* :func:`eig_hermitian`: the same Schur engine; for Hermitian input the
  Schur factor is diagonal and the accumulated unitary holds the eigenvectors.
* :func:`mat_exp`: scaling and squaring with diagonal Pade approximants.
* :func:`psd_sqrt`: principal square root of a positive definite matrix.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Eigenvectors
are stored as columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DegenerateSpectrum,
    DimensionMismatch,
    NotHermitian,
    NotPositiveDefinite,
    Overflow,
)

EPS = np.finfo(float).eps

HERMITICITY_TOL = 1e-10
CLUSTER_FACTOR = 1e-8
POSITIVITY_FACTOR = 1e-10

# Higham (2005) backward-error bounds for the [m/m] Pade approximant.
_PADE_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}
# ||sA||_1 above this needs more than 64 squarings.
EXP_SCALING_CAP = _PADE_THETA[13] * 2.0**64


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with right eigenvectors (columns of ``vectors``).

    ``residuals[k]`` is ``||A v_k - lambda_k v_k||``; ``condition`` is the
    2-norm condition number of the eigenvector matrix.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    condition: float

    @property
    def right_vectors(self) -> np.ndarray:
        return self.vectors

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Validate ``A`` as a finite square matrix and return a complex copy."""
    M = np.array(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def fro(A) -> float:
    return float(np.linalg.norm(A))


def dagger(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def hermiticity_residual(A: np.ndarray) -> float:
    """``||A - A^dagger||_F / ||A||_F`` (0 for the zero matrix)."""
    scale = fro(A)
    if scale == 0.0:
        return 0.0
    return fro(A - dagger(A)) / scale


def default_tol_eig(A: np.ndarray) -> float:
    return 1e-10 * A.shape[0] * max(fro(A), np.finfo(float).tiny)


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so that its largest-modulus component is real positive.

    Near-ties in modulus are resolved towards the lowest index so that
    rounding noise cannot flip the choice.
    """
    mod = np.abs(v)
    peak = mod.max()
    if peak == 0.0:
        return v
    k = int(np.flatnonzero(mod >= peak * (1.0 - 1e-8))[0])
    return v * (abs(v[k]) / v[k])


def _sort_order(values: np.ndarray) -> np.ndarray:
    # lexsort keys are given last-major
    return np.lexsort((values.imag, values.real))


# ---------------------------------------------------------------------------
# Schur decomposition


def hessenberg(A) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction ``A = Q Hs Q^dagger`` with ``Hs`` upper Hessenberg."""
    Hs = as_matrix(A)
    n = Hs.shape[0]
    Q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = Hs[k + 1 :, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        Hs[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ Hs[k + 1 :, :])
        Hs[:, k + 1 :] -= 2.0 * np.outer(Hs[:, k + 1 :] @ v, v.conj())
        Q[:, k + 1 :] -= 2.0 * np.outer(Q[:, k + 1 :] @ v, v.conj())
        Hs[k + 2 :, k] = 0.0
    return Hs, Q


def _givens(a: complex, b: complex) -> tuple[float, complex]:
    """Return ``(c, s)`` with ``[[c, s], [-conj(s), c]] @ [a, b] = [r, 0]``."""
    if b == 0:
        return 1.0, 0.0
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    r = math.hypot(abs(a), abs(b))
    return abs(a) / r, (a / abs(a)) * np.conj(b) / r


def _wilkinson_shift(T: np.ndarray, hi: int) -> complex:
    a, b = T[hi - 1, hi - 1], T[hi - 1, hi]
    c, d = T[hi, hi - 1], T[hi, hi]
    half_tr = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    mu1, mu2 = half_tr + disc, half_tr - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def schur(A, max_sweeps: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur form ``A = Z T Z^dagger`` by shifted QR iteration.

    Raises
    ------
    ConvergenceFailure
        If the total number of QR sweeps exceeds ``max_sweeps``
        (default ``60 * n``).
    """
    T, Z = hessenberg(A)
    n = T.shape[0]
    if max_sweeps is None:
        max_sweeps = 60 * n
    scale = fro(T)
    if scale == 0.0:
        return T, Z

    hi = n - 1
    sweeps = 0
    stalled = 0
    while hi > 0:
        lo = hi
        while lo > 0:
            off = abs(T[lo, lo - 1])
            ref = abs(T[lo, lo]) + abs(T[lo - 1, lo - 1])
            if ref == 0.0:
                ref = scale
            if off <= EPS * ref:
                T[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            stalled = 0
            continue

        sweeps += 1
        stalled += 1
        if sweeps > max_sweeps:
            raise ConvergenceFailure(f"QR iteration did not converge in {max_sweeps} sweeps")
        if stalled % 11 == 0:
            # exceptional shift to break cycles
            mu = T[hi, hi] + 0.75 * abs(T[hi, hi - 1]) * np.exp(0.5j * stalled)
        else:
            mu = _wilkinson_shift(T, hi)

        idx = np.arange(lo, hi + 1)
        T[idx, idx] -= mu
        rots = []
        for k in range(lo, hi):
            c, s = _givens(T[k, k], T[k + 1, k])
            rows = T[k : k + 2, k:]
            top = c * rows[0] + s * rows[1]
            bot = -np.conj(s) * rows[0] + c * rows[1]
            T[k, k:] = top
            T[k + 1, k:] = bot
            T[k + 1, k] = 0.0
            rots.append((k, c, s))
        for k, c, s in rots:
            stop = min(k + 2, hi) + 1
            for M, rows in ((T, slice(0, stop)), (Z, slice(None))):
                left = M[rows, k].copy()
                right = M[rows, k + 1]
                M[rows, k] = c * left + np.conj(s) * right
                M[rows, k + 1] = -s * left + c * right
        T[idx, idx] += mu
    return T, Z


def _triangular_eigvecs(T: np.ndarray) -> np.ndarray:
    """Eigenvectors of an upper-triangular matrix by back substitution."""
    n = T.shape[0]
    Y = np.zeros((n, n), dtype=complex)
    small = EPS * max(fro(T), np.finfo(float).tiny)
    diag = np.diag(T)
    for k in range(n):
        lam = diag[k]
        y = Y[:, k]
        y[k] = 1.0
        for i in range(k - 1, -1, -1):
            denom = diag[i] - lam
            if abs(denom) < small:
                denom = small
            y[i] = -(T[i, i + 1 : k + 1] @ y[i + 1 : k + 1]) / denom
    return Y


def _min_gap(values: np.ndarray) -> tuple[float, int, int]:
    n = len(values)
    best = (math.inf, -1, -1)
    for i in range(n):
        for j in range(i + 1, n):
            d = abs(values[i] - values[j])
            if d < best[0]:
                best = (d, i, j)
    return best


def eig_general(A, tol_eig: float | None = None) -> Spectrum:
    """Full eigendecomposition of a general (non-normal) complex matrix.

    Parameters
    ----------
    A : array_like
        Square matrix with finite entries.
    tol_eig : float, optional
        Bound on each residual ``||A v - lambda v||``.  Defaults to
        ``1e-10 * dim * ||A||_F``.

    Returns
    -------
    Spectrum
        Eigenvalues sorted by (real part, imaginary part); unit-norm
        eigenvectors with the largest component made real positive.

    Raises
    ------
    DegenerateSpectrum
        Two eigenvalues closer than ``1e-8 * ||A||_F``.
    ConvergenceFailure
        QR sweep cap hit, or a residual above ``tol_eig``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    normA = fro(A)
    if tol_eig is None:
        tol_eig = default_tol_eig(A)

    T, Z = schur(A)
    values = np.diag(T).copy()
    if n > 1:
        gap, i, j = _min_gap(values)
        if gap <= CLUSTER_FACTOR * normA:
            raise DegenerateSpectrum(
                f"eigenvalues {values[i]:.6g} and {values[j]:.6g} closer than "
                f"{CLUSTER_FACTOR:g}*||A|| (gap {gap:.3g})"
            )
    V = Z @ _triangular_eigvecs(T)
    V /= np.linalg.norm(V, axis=0)
    order = _sort_order(values)
    values = values[order]
    V = V[:, order]
    for k in range(n):
        V[:, k] = fix_phase(V[:, k])
    residuals = np.linalg.norm(A @ V - V * values, axis=0)
    if np.any(residuals > tol_eig):
        raise ConvergenceFailure(
            f"eigen-residual {residuals.max():.3g} exceeds tol_eig={tol_eig:.3g}"
        )
    return Spectrum(values, V, residuals, float(np.linalg.cond(V)))


def eig_hermitian(A, tol: float = HERMITICITY_TOL) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    Degenerate eigenvalues are allowed.  The eigenvectors are orthonormal
    to working precision because they are the columns of the accumulated
    unitary Schur factor.

    Raises
    ------
    NotHermitian
        If ``||A - A^dagger||_F > tol * ||A||_F``.
    """
    A = as_matrix(A)
    if hermiticity_residual(A) > tol:
        raise NotHermitian(f"Hermiticity residual {hermiticity_residual(A):.3g} exceeds {tol:g}")
    A = 0.5 * (A + dagger(A))
    T, Z = schur(A)
    values = np.diag(T).real.copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    V = Z[:, order]
    for k in range(V.shape[1]):
        V[:, k] = fix_phase(V[:, k])
    residuals = np.linalg.norm(A @ V - V * values, axis=0)
    return Spectrum(values.astype(complex), V, residuals, 1.0)


def hermitian_function(A, func, positivity: bool = True) -> np.ndarray:
    """Apply ``func`` to the eigenvalues of Hermitian ``A``: ``V f(D) V^dagger``.

    With ``positivity`` set, raises :class:`NotPositiveDefinite` unless the
    smallest eigenvalue exceeds ``1e-10 * max|eigenvalue|``.
    """
    spec = eig_hermitian(A)
    w = spec.eigenvalues.real
    if positivity:
        check_positive(w)
    V = spec.vectors
    B = (V * func(w)) @ dagger(V)
    return 0.5 * (B + dagger(B))


def check_positive(w: np.ndarray, factor: float = POSITIVITY_FACTOR) -> None:
    w = np.asarray(w, dtype=float)
    threshold = factor * np.abs(w).max() if w.size else 0.0
    if w.size == 0 or w.min() <= threshold:
        raise NotPositiveDefinite(
            f"minimum eigenvalue {w.min():.3g} not above positivity threshold {threshold:.3g}"
        )


def psd_sqrt(A) -> np.ndarray:
    """Principal (Hermitian positive) square root of a positive definite matrix."""
    return hermitian_function(A, np.sqrt)


def psd_inv_sqrt(A) -> np.ndarray:
    """Inverse of :func:`psd_sqrt`, computed from the same eigendecomposition."""
    return hermitian_function(A, lambda w: 1.0 / np.sqrt(w))


# ---------------------------------------------------------------------------
# Matrix exponential


def _pade_coefficients(m: int) -> list[float]:
    f = math.factorial
    return [f(2 * m - j) * f(m) / (f(2 * m) * f(j) * f(m - j)) for j in range(m + 1)]


def _pade(A: np.ndarray, m: int) -> np.ndarray:
    b = _pade_coefficients(m)
    n = A.shape[0]
    ident = np.eye(n, dtype=complex)
    A2 = A @ A
    if m == 13:
        A4 = A2 @ A2
        A6 = A4 @ A2
        u = A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
        u += b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident
        U = A @ u
        V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
        V += b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident
    else:
        powers = [ident, A2]
        for _ in range(2, m // 2 + 1):
            powers.append(powers[-1] @ A2)
        U = A @ sum(b[2 * k + 1] * powers[k] for k in range(m // 2 + 1))
        V = sum(b[2 * k] * powers[k] for k in range(m // 2 + 1))
    return np.linalg.solve(V - U, V + U)


def mat_exp(A, s: complex = 1.0) -> np.ndarray:
    """``exp(s * A)`` by scaling and squaring with a diagonal Pade approximant.

    The approximant degree (3, 5, 7, 9 or 13) and the number of squarings
    follow the 1-norm thresholds of Higham's 2005 algorithm.

    Raises
    ------
    Overflow
        If ``||s A||_1`` exceeds the scaling cap, or the result is not finite.
    """
    M = as_matrix(A) * s
    norm1 = float(np.abs(M).sum(axis=0).max())
    if not math.isfinite(norm1) or norm1 > EXP_SCALING_CAP:
        raise Overflow(f"||sA||_1 = {norm1:.3g} exceeds scaling cap {EXP_SCALING_CAP:.3g}")
    for m in (3, 5, 7, 9):
        if norm1 <= _PADE_THETA[m]:
            return _pade(M, m)
    squarings = max(0, math.ceil(math.log2(norm1 / _PADE_THETA[13])))
    X = _pade(M / 2.0**squarings, 13)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(squarings):
            X = X @ X
    if not np.all(np.isfinite(X)):
        raise Overflow(f"exp(sA) overflowed after {squarings} squarings")
    return X


def mat_exp_eig(A, s: complex = 1.0) -> np.ndarray:
    """Eigen-route ``V exp(s Lambda) V^{-1}``; cross-check for :func:`mat_exp`."""
    spec = eig_general(A)
    V = spec.vectors
    return (V * np.exp(s * spec.eigenvalues)) @ np.linalg.inv(V)


def eigvals(A) -> np.ndarray:
    """Eigenvalues only (Schur diagonal), sorted; no degeneracy check."""
    T, _ = schur(A)
    values = np.diag(T).copy()
    return values[_sort_order(values)]
