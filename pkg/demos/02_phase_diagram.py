"""
Where the spectrum stops being real
===================================

Sweep the two-level cell over ``a`` at fixed ``b`` and watch the smallest
eigenvalue of the metric.  It is positive while the energies are real and
turns negative once they become a conjugate pair.  The point ``|a| = b``
itself is an exceptional point where the two eigenvectors coalesce.
"""

# %%
import numpy as np

from quasiherm import sweep_phase_diagram

rows = sweep_phase_diagram("PT2Cell", {"a": np.round(np.arange(0.0, 1.51, 0.125), 6), "b": [1.0]})
print(f"{'a':>6}  {'verdict':<17} {'max|Im E|':>10} {'min eig Theta':>14}")
for r in rows:
    print(f"{r.params['a']:6.3f}  {r.verdict:<17} {r.max_im_E:10.4f} {r.min_theta_eigenvalue:14.4f}")

# %%
# The same picture for an open chain with gain at one end and loss at the
# other.  Even chains break exactly at gamma = coupling; odd chains hold
# out a little longer.
for n in (4, 5):
    rows = sweep_phase_diagram("GainLossChain", {"n": [n], "gamma": np.linspace(0.8, 1.4, 7), "coupling": [1.0]})
    print(f"\nchain n={n}")
    for r in rows:
        print(f"  gamma={r.params['gamma']:.2f}  {r.verdict}")
