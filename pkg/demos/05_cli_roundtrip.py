"""
Driving the command line from Python
====================================

Writes operator files for the two-level cell, runs ``quasiherm analyze``
and ``quasiherm evolve`` on them, and prints the results.
"""

# %%
import json
import subprocess
import sys
import tempfile
from pathlib import Path

from quasiherm import model_pt2
from quasiherm.fileio import write_operator, write_state

tmp = Path(tempfile.mkdtemp())
H, P = model_pt2(0.6, 1.0)
write_operator(tmp / "H.json", H, label="cell")
write_operator(tmp / "P.json", P.P, label="exchange")
write_state(tmp / "psi.json", [1.0, 0.0], label="up")


def quasiherm(*args):
    proc = subprocess.run([sys.executable, "-m", "quasiherm.cli", *map(str, args)], capture_output=True, text=True)
    return proc.returncode, proc.stdout


# %%
code, out = quasiherm("analyze", tmp / "H.json", tmp / "P.json")
report = json.loads(out)
print("exit", code, "verdict", report["verdict"], "status", report["status"])
for name in ("theta_quasi_hermiticity_residual", "c_involutivity_residual", "isospectrality_residual"):
    print(f"  {name} = {report['certificates'][name]:.2e}")

# %%
code, out = quasiherm("evolve", tmp / "H.json", tmp / "psi.json", "--pseudometric", tmp / "P.json", "--t-max", 5, "--steps", 10)
print("exit", code)
print(out)
