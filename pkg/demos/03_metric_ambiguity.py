"""
Many metrics, one normalization
===============================

Any ``Theta = sum_n t_n^2 |psi^n><psi^n|`` with positive ``t_n`` makes H
quasi-Hermitian.  Requiring ``Theta = P C`` with ``C^2 = I`` picks one.
"""

# %%
import numpy as np

from quasiherm import model_chain, solve_biorthogonal, classify_pt
from quasiherm.metric import build_c_operator, build_metric, fix_pc_normalization

H, P = model_chain(5, 0.5, 1.0)
sys_ = solve_biorthogonal(H)
cls = classify_pt(H, P, sys_)

rng = np.random.default_rng(1)
for label, scales in [("unit", None), ("random", rng.uniform(0.5, 2.0, 5))]:
    theta = build_metric(sys_, scales)
    c = build_c_operator(theta, P, strict=False)
    print(f"{label:>7} scales: quasi-H residual {theta.quasi_h_residual:.1e}, ||(P Theta)^2 - I|| {c.involutivity_residual:.3f}")

# %%
# The closed form t_n = |kappa_n|^{-1/2} and a least-squares fit agree.
closed, signs = fix_pc_normalization(sys_, cls, P)
fitted, _ = fix_pc_normalization(sys_, cls, P, method="minimize")
print("closed :", np.round(closed, 6))
print("fitted :", np.round(fitted, 6))
print("C signs:", signs)
theta = build_metric(sys_, closed)
print("||(P Theta)^2 - I|| =", build_c_operator(theta, P).involutivity_residual)
