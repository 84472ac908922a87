"""End-to-end analysis: classify, build the metric, fix ``Theta = P C``, hermitize."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .biortho import BiorthogonalSystem, biortho_residual, solve_biorthogonal
from .dyson import DysonMap, dyson_from_metric, hermitize
from .krein import (
    REALITY_TOL,
    PTClassification,
    Pseudometric,
    Verdict,
    as_pseudometric,
    classify_pt,
    pseudo_hermiticity_residual,
)
from .matkernel import as_matrix, dagger, eig_hermitian, fro
from .metric import (
    CERT_TOL,
    COperator,
    MetricOperator,
    build_c_operator,
    build_metric,
    fix_pc_normalization,
)


@dataclass(frozen=True)
class Analysis:
    """Everything the pipeline produced for one ``(H, P)``.

    In the broken phase only ``system`` and ``classification`` are set.
    """

    H: np.ndarray
    P: Pseudometric
    pseudo_hermiticity_residual: float
    system: BiorthogonalSystem
    classification: PTClassification
    metric: MetricOperator | None = None
    signs: np.ndarray | None = None
    c_operator: COperator | None = None
    dyson: DysonMap | None = None
    h: np.ndarray | None = None
    h_eigenvalues: np.ndarray | None = None
    tol_cert: float = CERT_TOL

    @property
    def verdict(self) -> Verdict:
        return self.classification.verdict

    @property
    def certified(self) -> bool:
        return self.metric is not None and self.metric.quasi_h_residual <= self.tol_cert

    def certificates(self) -> dict[str, float]:
        cls = self.classification
        kappa = cls.proportionality_constants[cls.real_flags]
        out = {
            "pseudo_hermiticity_residual": self.pseudo_hermiticity_residual,
            "biortho_residual": biortho_residual(self.H, self.system),
            "biortho_gram_residual": self.system.gram_residual,
            "biortho_max_pairing_residual": float(self.system.pairing_residuals.max()),
            "conjugate_pairing_residual": float(
                np.abs(self.system.left_eigenvalues - self.system.eigenvalues.conj()).max()
            ),
            "proportionality_residual_max": float(cls.residuals.max()),
            "kappa_max_relative_imag": float(np.max(np.abs(kappa.imag) / np.abs(kappa))) if kappa.size else 0.0,
            "max_abs_imag_eigenvalue": cls.max_imag,
        }
        if self.metric is not None:
            m = self.metric
            out.update(
                theta_quasi_hermiticity_residual=m.quasi_h_residual,
                theta_hermiticity_residual=m.hermiticity_residual,
                theta_min_eigenvalue=m.min_eigenvalue,
                theta_condition=m.condition,
                theta_inverse_residual=fro(m.theta @ m.theta_inverse - np.eye(m.dim)),
                c_involutivity_residual=self.c_operator.involutivity_residual,
                c_commutator_residual=self.c_operator.commutator_residual,
                pc_factorization_residual=fro(self.P.P @ self.c_operator.C - m.theta),
                dyson_factorization_residual=self.dyson.factorization_residual,
                dyson_inverse_residual=self.dyson.inverse_residual,
                dyson_condition=self.dyson.condition,
                hermitized_hermiticity_residual=fro(self.h - dagger(self.h)) / fro(self.h)
                if fro(self.h)
                else 0.0,
                isospectrality_residual=float(np.abs(self.h_eigenvalues - self.system.eigenvalues.real).max()),
            )
        return out


def analyze(
    H,
    P=None,
    tol_eig: float | None = None,
    reality_tol: float = REALITY_TOL,
    tol_cert: float = CERT_TOL,
) -> Analysis:
    """Run the full chain for ``H`` with pseudometric ``P`` (identity by default).

    Errors from the individual stages propagate unchanged, except that a
    broken spectrum ends the chain early with a broken verdict.
    """
    H = as_matrix(H, "H")
    P = as_pseudometric(np.eye(H.shape[0]) if P is None else P)
    phr = pseudo_hermiticity_residual(H, P)
    sys = solve_biorthogonal(H, tol_eig)
    cls = classify_pt(H, P, sys, reality_tol, pseudo_tol=tol_cert)
    if cls.verdict != Verdict.UNBROKEN:
        return Analysis(H, P, phr, sys, cls, tol_cert=tol_cert)

    scales, signs = fix_pc_normalization(sys, cls, P)
    metric = build_metric(sys, scales, reality_tol)
    c_op = build_c_operator(metric, P, H)
    dyson = dyson_from_metric(metric)
    h = hermitize(H, dyson, tol_cert)
    h_eig = eig_hermitian(0.5 * (h + dagger(h))).eigenvalues.real
    return Analysis(H, P, phr, sys, cls, metric, signs, c_op, dyson, h, h_eig, tol_cert)
