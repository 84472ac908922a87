"""Time evolution in the Schroedinger and Heisenberg pictures.

States evolve as ``psi(t) = exp(-iHt) psi(0)`` and observables as
``X(t) = exp(iHt) X exp(-iHt)``, with the same ``H`` in both exponents even
though ``H`` is not Hermitian.  With a metric ``Theta`` satisfying
``Theta H = H^dagger Theta`` this keeps ``<psi(t), Theta psi(t)>`` constant
and makes both pictures give the same ``Theta``-weighted expectations.

Propagators are exact matrix exponentials (units with hbar = 1).  On a
uniform grid the one-step propagator is computed once and reused.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, Overflow
from .matkernel import as_matrix, dagger, fro, mat_exp, psd_inv_sqrt, psd_sqrt
from .metric import MetricOperator

NORM_CAP = 1e150

RULES = ("consistent", "naive")


@dataclass(frozen=True)
class Trajectory:
    """Evolution record on a time grid.

    For the Schroedinger picture ``states`` has shape ``(len(t_grid), n)``
    and the norms are ``sqrt<psi, Theta psi>`` (``s_norms``) and the plain
    Euclidean norm (``f_norms``).  For the Heisenberg picture ``states`` has
    shape ``(len(t_grid), n, n)``, ``f_norms`` are Frobenius norms of
    ``X(t)`` and ``s_norms`` those of its Dyson image
    ``Omega X(t) Omega^{-1}``.
    """

    t_grid: np.ndarray
    states: np.ndarray
    s_norms: np.ndarray
    f_norms: np.ndarray
    picture: str

    @property
    def growth_rate(self) -> float:
        """Least-squares slope of ``log f_norm`` against ``t``."""
        if len(self.t_grid) < 2:
            return 0.0
        return float(np.polyfit(self.t_grid, np.log(self.f_norms), 1)[0])

    def s_norm_drift(self) -> float:
        return float(np.abs(self.s_norms - self.s_norms[0]).max() / self.s_norms[0])

    def f_norm_drift(self) -> float:
        return float(np.abs(self.f_norms - self.f_norms[0]).max() / self.f_norms[0])


def evolution_tolerance(H, t: float) -> float:
    return 1e-9 * (1.0 + abs(t) * fro(H))


def _grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float).ravel()
    if t.size == 0:
        raise ValueError("empty time grid")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def _is_uniform(t: np.ndarray) -> bool:
    if t.size < 3:
        return False
    dt = np.diff(t)
    return bool(np.all(np.abs(dt - dt[0]) <= 1e-12 * abs(dt[0])))


def _propagators(A: np.ndarray, s: complex, t: np.ndarray):
    """Yield ``exp(s t_k A)`` for each grid node."""
    if _is_uniform(t):
        step = mat_exp(A, s * (t[1] - t[0]))
        U = mat_exp(A, s * t[0])
        yield U
        for _ in range(1, t.size):
            U = step @ U
            yield U
    else:
        for tk in t:
            yield mat_exp(A, s * tk)


def _theta(theta, n: int) -> np.ndarray:
    if theta is None:
        return np.eye(n, dtype=complex)
    T = theta.theta if isinstance(theta, MetricOperator) else as_matrix(theta, "theta")
    if T.shape[0] != n:
        raise DimensionMismatch(f"metric has dim {T.shape[0]}, H has dim {n}")
    return T


def _check_finite(norm: float, t: float) -> None:
    if not np.isfinite(norm) or norm > NORM_CAP:
        raise Overflow(f"norm {norm:.3g} at t={t:g}: exponential growth beyond representable range")


def evolve_schrodinger(H, psi0, t_grid, theta: MetricOperator | None = None) -> Trajectory:
    """Propagate ``psi0`` with ``exp(-iHt)`` over ``t_grid``.

    ``theta=None`` means identity-metric (F-space) bookkeeping, which is
    the only meaningful choice in the broken phase.

    Raises
    ------
    Overflow
        The state norm leaves the representable range.
    """
    H = as_matrix(H, "H")
    n = H.shape[0]
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (n,):
        raise DimensionMismatch(f"state has shape {psi0.shape}, expected ({n},)")
    if not np.any(psi0):
        raise ValueError("initial state is zero")
    t = _grid(t_grid)
    T = _theta(theta, n)

    states = np.empty((t.size, n), dtype=complex)
    s_norms = np.empty(t.size)
    f_norms = np.empty(t.size)
    with np.errstate(over="ignore", invalid="ignore"):
        for k, U in enumerate(_propagators(H, -1j, t)):
            psi = U @ psi0
            f = float(np.linalg.norm(psi))
            _check_finite(f, t[k])
            states[k] = psi
            f_norms[k] = f
            s_norms[k] = np.sqrt(max(np.vdot(psi, T @ psi).real, 0.0))
    return Trajectory(t, states, s_norms, f_norms, "schrodinger")


def evolve_heisenberg(H, X, t_grid, theta: MetricOperator | None = None, rule: str = "consistent") -> Trajectory:
    """Evolve an operator: ``X(t) = exp(iHt) X exp(-iHt)``.

    ``rule="naive"`` uses ``exp(iHt) X exp(-iH^dagger t)`` instead; it is
    kept only as a negative control, since it breaks agreement with the
    Schroedinger picture.
    """
    if rule not in RULES:
        raise ValueError(f"rule must be one of {RULES}")
    H = as_matrix(H, "H")
    X = as_matrix(X, "X")
    n = H.shape[0]
    if X.shape[0] != n:
        raise DimensionMismatch(f"X has dim {X.shape[0]}, H has dim {n}")
    t = _grid(t_grid)
    right_gen = H if rule == "consistent" else dagger(H)
    if theta is None:
        omega = omega_inv = np.eye(n, dtype=complex)
    else:
        T = _theta(theta, n)
        omega, omega_inv = psd_sqrt(T), psd_inv_sqrt(T)

    states = np.empty((t.size, n, n), dtype=complex)
    s_norms = np.empty(t.size)
    f_norms = np.empty(t.size)
    with np.errstate(over="ignore", invalid="ignore"):
        pairs = zip(_propagators(H, 1j, t), _propagators(right_gen, -1j, t))
        for k, (Ul, Ur) in enumerate(pairs):
            Xt = Ul @ X @ Ur
            f = fro(Xt)
            _check_finite(f, t[k])
            states[k] = Xt
            f_norms[k] = f
            s_norms[k] = fro(omega @ Xt @ omega_inv)
    return Trajectory(t, states, s_norms, f_norms, "heisenberg")


def s_inner(phi, psi, theta: MetricOperator) -> complex:
    """Physical inner product ``<phi, Theta psi>``."""
    phi = np.asarray(phi, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    n = theta.dim if isinstance(theta, MetricOperator) else np.shape(theta)[0]
    if phi.shape != (n,) or psi.shape != (n,):
        raise DimensionMismatch(f"vectors of shape {phi.shape}, {psi.shape} against metric dim {n}")
    return complex(np.vdot(phi, _theta(theta, n) @ psi))


def exp_intertwine_residual(H, theta: MetricOperator, t: float) -> float:
    """``||exp(iH^dagger t) - Theta exp(iHt) Theta^{-1}||_F / ||exp(iH^dagger t)||_F``."""
    H = as_matrix(H, "H")
    if H.shape[0] != theta.dim:
        raise DimensionMismatch(f"H has dim {H.shape[0]}, metric has dim {theta.dim}")
    if t == 0:
        return 0.0
    lhs = mat_exp(dagger(H), 1j * t)
    rhs = theta.theta @ mat_exp(H, 1j * t) @ theta.theta_inverse
    return fro(lhs - rhs) / fro(lhs)


def expectation_consistency(H, X, phi0, psi0, theta: MetricOperator, t_grid, rule: str = "consistent") -> float:
    """Largest gap between the two pictures' ``Theta``-weighted matrix elements.

    Schroedinger side: ``<phi(t), Theta X psi(t)>``.  Heisenberg side:
    ``<phi0, Theta X(t) psi0>`` with ``X(t)`` from :func:`evolve_heisenberg`
    under ``rule``.
    """
    H = as_matrix(H, "H")
    X = as_matrix(X, "X")
    T = _theta(theta, H.shape[0])
    phi_traj = evolve_schrodinger(H, phi0, t_grid)
    psi_traj = evolve_schrodinger(H, psi0, t_grid)
    heis = evolve_heisenberg(H, X, t_grid, rule=rule)
    TX = T @ X
    phi0 = np.asarray(phi0, dtype=complex)
    psi0 = np.asarray(psi0, dtype=complex)
    worst = 0.0
    for k in range(len(heis.t_grid)):
        schr = np.vdot(phi_traj.states[k], TX @ psi_traj.states[k])
        hsb = np.vdot(phi0, T @ heis.states[k] @ psi0)
        worst = max(worst, abs(schr - hsb))
    return float(worst)
