"""
A two-level gain/loss cell
==========================

``H = [[i a, b], [b, -i a]]`` is not Hermitian, yet for ``|a| < b`` its
energies ``+-sqrt(b^2 - a^2)`` are real.  This walkthrough builds the
metric that makes it a legitimate Hamiltonian and checks every step.
"""

# %%
import numpy as np

from quasiherm import analyze, model_pt2

np.set_printoptions(precision=4, suppress=True)

H, P = model_pt2(0.6, 1.0)
print("H =\n", H)
print("P (exchange) =\n", P.P)

# %%
# H is P-self-adjoint: H^dagger P = P H.  That alone does not make the
# spectrum real, it only pairs E with conj(E).
res = analyze(H, P)
print("verdict:", res.verdict)
print("energies:", res.system.eigenvalues.real)
print("kappa_n = 1/<psi_n, P psi_n>:", res.classification.kappa.real)

# %%
# The metric.  Its eigenvalues are positive and it satisfies
# Theta H = H^dagger Theta.
theta = res.metric
print("Theta =\n", theta.theta)
print("eigenvalues of Theta:", theta.min_eigenvalue, theta.max_eigenvalue)
print("quasi-Hermiticity residual:", theta.quasi_h_residual)

# %%
# With the scales t_n = |kappa_n|^{-1/2}, C = P Theta squares to one and
# commutes with H.
print("||C^2 - I|| =", res.c_operator.involutivity_residual)
print("||[C, H]|| (relative) =", res.c_operator.commutator_residual)

# %%
# Omega = Theta^{1/2} turns H into an ordinary Hermitian matrix with the
# same energies.
h = res.h
print("h =\n", h)
print("||h - h^dagger|| =", np.linalg.norm(h - h.conj().T))
print("eigenvalues of h:", res.h_eigenvalues)
