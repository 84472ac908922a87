"""Quasi-Hermitian quantum mechanics in finite dimension.

Given a non-Hermitian ``H`` and a Krein pseudometric ``P`` with
``H^dagger P = P H``, the package decides whether the spectrum is real,
builds the positive metric ``Theta`` (normalized so that ``Theta = P C``
with ``C^2 = I``), the Dyson map ``Omega = Theta^{1/2}`` and the Hermitian
partner ``Omega H Omega^{-1}``, and evolves states and observables so that
probabilities measured with ``Theta`` are conserved.
"""

__version__ = "0.1.0"

from .biortho import BiorthogonalSystem, biortho_residual, solve_biorthogonal
from .dynamics import (
    Trajectory,
    evolve_heisenberg,
    evolve_schrodinger,
    exp_intertwine_residual,
    expectation_consistency,
    s_inner,
)
from .dyson import DysonMap, dyson_from_metric, hermitize, map_state
from .krein import (
    PTClassification,
    Pseudometric,
    Verdict,
    classify_pt,
    pseudo_hermiticity_residual,
)
from .matkernel import Spectrum, eig_general, eig_hermitian, mat_exp, psd_sqrt
from .metric import (
    COperator,
    MetricOperator,
    build_c_operator,
    build_metric,
    fix_pc_normalization,
    observable_compatibility,
    s_adjoint,
)
from .models import ModelSpec, model_chain, model_pt2, sweep_phase_diagram
from .pipeline import Analysis, analyze
