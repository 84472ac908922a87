"""Benchmark P-self-adjoint Hamiltonians and phase-diagram sweeps."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .biortho import solve_biorthogonal
from .errors import DegenerateSpectrum, InvalidGrid, QuasiHermError
from .krein import REALITY_TOL, Pseudometric, Verdict, classify_pt
from .matkernel import eig_hermitian, eigvals
from .metric import assemble_theta, fix_pc_normalization

FAMILIES = {
    "PT2Cell": ("a", "b"),
    "GainLossChain": ("n", "gamma", "coupling"),
}


@dataclass(frozen=True)
class ModelSpec:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {sorted(FAMILIES)}")
        missing = set(FAMILIES[self.family]) - set(self.params)
        if missing:
            raise ValueError(f"missing parameters {sorted(missing)} for {self.family}")
        p = self.params
        if self.family == "PT2Cell":
            if not p["b"] > 0:
                raise ValueError("PT2Cell requires b > 0")
        else:
            if int(p["n"]) != p["n"] or p["n"] < 2:
                raise ValueError("GainLossChain requires integer n >= 2")
            if not p["coupling"] > 0:
                raise ValueError("GainLossChain requires coupling > 0")
            if not p["gamma"] >= 0:
                raise ValueError("GainLossChain requires gamma >= 0")

    def build(self) -> tuple[np.ndarray, Pseudometric]:
        if self.family == "PT2Cell":
            return model_pt2(self.params["a"], self.params["b"])
        p = self.params
        return model_chain(int(p["n"]), p["gamma"], p["coupling"])


def exchange(n: int) -> np.ndarray:
    """Anti-diagonal exchange (parity) matrix."""
    return np.eye(n, dtype=complex)[::-1].copy()


def model_pt2(a: float, b: float) -> tuple[np.ndarray, Pseudometric]:
    """``H = [[ia, b], [b, -ia]]`` with ``P`` the 2x2 exchange.

    Eigenvalues are ``+-sqrt(b^2 - a^2)``; the exceptional point is ``|a| = b``.
    """
    if not b > 0:
        raise ValueError("b must be positive")
    H = np.array([[1j * a, b], [b, -1j * a]], dtype=complex)
    return H, Pseudometric.from_matrix(exchange(2))


def model_chain(n: int, gamma: float, coupling: float) -> tuple[np.ndarray, Pseudometric]:
    """Open tight-binding chain with gain ``+i gamma`` and loss ``-i gamma`` at the ends."""
    if n < 2 or coupling <= 0 or gamma < 0:
        raise ValueError("need n >= 2, coupling > 0, gamma >= 0")
    H = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    H[idx, idx + 1] = coupling
    H[idx + 1, idx] = coupling
    H[0, 0] += 1j * gamma
    H[-1, -1] -= 1j * gamma
    return H, Pseudometric.from_matrix(exchange(n))


@dataclass(frozen=True)
class SweepRow:
    params: dict
    verdict: str
    max_im_E: float
    min_theta_eigenvalue: float
    detail: str = ""


def sweep_point(spec: ModelSpec, reality_tol: float = REALITY_TOL) -> SweepRow:
    """Classify one model and report the smallest metric eigenvalue.

    Unbroken points use the PC-fixed scales; broken points use unit scales
    in the pairing-aware metric, whose negative minimum eigenvalue signals
    indefiniteness.  Exceptional points and other failures become rows.
    """
    H, P = spec.build()
    max_im = float(np.abs(eigvals(H).imag).max())
    try:
        sys = solve_biorthogonal(H)
    except DegenerateSpectrum as exc:
        return SweepRow(dict(spec.params), Verdict.EXCEPTIONAL_POINT.value, max_im, math.nan, str(exc))
    try:
        cls = classify_pt(H, P, sys, reality_tol)
        if cls.verdict == Verdict.UNBROKEN:
            scales, _ = fix_pc_normalization(sys, cls, P)
        else:
            scales = None
        theta = assemble_theta(sys, scales, reality_tol)
        theta = 0.5 * (theta + theta.conj().T)
        min_eig = float(eig_hermitian(theta).eigenvalues.real.min())
    except QuasiHermError as exc:
        return SweepRow(dict(spec.params), "Error", max_im, math.nan, f"{type(exc).__name__}: {exc}")
    return SweepRow(dict(spec.params), cls.verdict.value, max_im, min_eig)


def sweep_phase_diagram(family: str, param_grid: dict, reality_tol: float = REALITY_TOL) -> list[SweepRow]:
    """Evaluate every point of a Cartesian parameter grid.

    Rows come out in lexicographic order of the family's parameters (each
    axis sorted ascending).

    Raises
    ------
    InvalidGrid
        Unknown family, missing or empty axis, or invalid parameter values.
    """
    if family not in FAMILIES:
        raise InvalidGrid(f"unknown family {family!r}")
    names = FAMILIES[family]
    axes = []
    for name in names:
        values = param_grid.get(name)
        if values is None:
            raise InvalidGrid(f"no grid for parameter {name!r}")
        values = sorted(set(np.atleast_1d(values).tolist()))
        if not values:
            raise InvalidGrid(f"empty grid for parameter {name!r}")
        axes.append(values)
    specs = []
    for combo in itertools.product(*axes):
        try:
            specs.append(ModelSpec(family, dict(zip(names, combo))))
        except ValueError as exc:
            raise InvalidGrid(str(exc)) from exc
    return [sweep_point(s, reality_tol) for s in specs]


def random_unbroken_instance(rng: np.random.Generator, max_dim: int = 12):
    """Random model safely inside the unbroken region (dims 2..max_dim).

    PT2Cell draws ``|a| <= 0.85 b``; chains draw ``gamma <= 0.85 coupling``
    (breaking sets in at ``gamma = coupling`` or later for these chains).
    """
    if rng.random() < 0.3:
        b = rng.uniform(0.3, 3.0)
        a = rng.uniform(-0.85, 0.85) * b
        return ModelSpec("PT2Cell", {"a": a, "b": b})
    n = int(rng.integers(2, max_dim + 1))
    coupling = rng.uniform(0.3, 3.0)
    gamma = rng.uniform(0.05, 0.85) * coupling
    return ModelSpec("GainLossChain", {"n": n, "gamma": gamma, "coupling": coupling})
