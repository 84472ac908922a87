"""
Conserved probability and the two pictures
==========================================

``exp(-iHt)`` is not unitary for non-Hermitian H, so the ordinary norm of
a state drifts.  The metric norm ``sqrt<psi, Theta psi>`` does not.
"""

# %%
import numpy as np

from quasiherm import analyze, evolve_schrodinger, expectation_consistency, model_chain

H, P = model_chain(4, 0.6, 1.0)
res = analyze(H, P)
t = np.linspace(0.0, 10.0, 201)
psi0 = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)

traj = evolve_schrodinger(H, psi0, t, res.metric)
print(f"metric norm drift   {traj.s_norm_drift():.2e}")
print(f"ordinary norm drift {traj.f_norm_drift():.2e}")
for k in range(0, 201, 40):
    print(f"  t={t[k]:5.2f}  s_norm={traj.s_norms[k]:.12f}  f_norm={traj.f_norms[k]:.6f}")

# %%
# Observables evolve as exp(iHt) X exp(-iHt), with H on both sides.  The
# tempting exp(iHt) X exp(-iH^dagger t) gives different numbers.
rng = np.random.default_rng(0)
X = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
phi = rng.normal(size=4) + 0j
psi = rng.normal(size=4) + 0j
print("same H on both sides :", expectation_consistency(H, X, phi, psi, res.metric, t))
print("H^dagger on the right:", expectation_consistency(H, X, phi, psi, res.metric, t, rule="naive"))

# %%
# Past the threshold there is no metric.  The ordinary norm grows at the
# rate set by the largest imaginary part of the spectrum.
Hb, _ = model_chain(4, 1.3, 1.0)
broken = evolve_schrodinger(Hb, psi0, np.linspace(0.0, 20.0, 201))
print("growth rate of log|psi|:", round(broken.growth_rate, 4))
print("max Im E:", np.abs(np.linalg.eigvals(Hb).imag).max().round(4))
