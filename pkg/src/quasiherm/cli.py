"""``quasiherm analyze|evolve|sweep`` command-line front end.

Exit codes: 0 certified unbroken run, 2 broken (valid input, no positive
metric), 1 any failure.  Errors are printed to stderr with the name of the
module that raised them, e.g. ``biortho.DegenerateSpectrum``.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback

import numpy as np

from . import __version__
from .dynamics import evolve_heisenberg, evolve_schrodinger
from .errors import DimensionMismatch, InvalidGrid, QuasiHermError
from .fileio import atomic_write, csv_line, read_operator, read_state
from .krein import REALITY_TOL, Verdict
from .metric import CERT_TOL, MetricOperator
from .models import FAMILIES, sweep_phase_diagram
from .pipeline import analyze

EXIT_OK, EXIT_ERROR, EXIT_BROKEN = 0, 1, 2

FAMILY_ALIASES = {"pt2": "PT2Cell", "pt2cell": "PT2Cell", "chain": "GainLossChain", "gainlosschain": "GainLossChain"}


def qualified_name(exc: BaseException) -> str:
    """``<module>.<ExceptionName>`` using the innermost package frame that raised it."""
    module = None
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        name = frame.f_globals.get("__name__", "")
        if name.startswith(__package__ + ".") and not name.endswith(".errors"):
            module = name.rsplit(".", 1)[-1]
    return f"{module}.{type(exc).__name__}" if module else type(exc).__name__


def _pair(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _add_tolerances(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-eig", type=float, default=None, help="eigen-residual bound (default 1e-10*dim*||H||_F)")
    p.add_argument("--tol-reality", type=float, default=REALITY_TOL, help="relative |Im E| threshold for reality")
    p.add_argument("--tol-cert", type=float, default=CERT_TOL, help="certification threshold for residuals")


def _load_pair(args):
    H, h_meta = read_operator(args.hamiltonian)
    if args.pseudometric:
        P, p_meta = read_operator(args.pseudometric)
        if P.shape != H.shape:
            raise DimensionMismatch(f"pseudometric dim {P.shape[0]} != hamiltonian dim {H.shape[0]}")
    else:
        P, p_meta = np.eye(H.shape[0]), {"label": "identity", "dim": H.shape[0], "sha256": None}
    return H, h_meta, P, p_meta


def build_report(args) -> tuple[dict, int]:
    H, h_meta, P, p_meta = _load_pair(args)
    result = analyze(H, P, args.tol_eig, args.tol_reality, args.tol_cert)
    cls = result.classification
    sys_ = result.system
    rows = []
    for n, E in enumerate(sys_.eigenvalues):
        row = {"n": n, "E": _pair(E), "real": bool(cls.real_flags[n])}
        if cls.real_flags[n]:
            row["kappa"] = _pair(cls.proportionality_constants[n])
        else:
            row["partner"] = cls.pairing[n]
        if result.metric is not None:
            row["scale"] = float(result.metric.scales[n])
            row["c_sign"] = int(result.signs[n])
            row["h_eigenvalue"] = float(result.h_eigenvalues[n])
        rows.append(row)

    if cls.verdict == Verdict.UNBROKEN:
        status = "certified" if result.certified else "uncertified"
        code = EXIT_OK if result.certified else EXIT_ERROR
    else:
        status = "BrokenPhase"
        code = EXIT_BROKEN
    report = {
        "tool": "quasiherm",
        "version": __version__,
        "command": "analyze",
        "inputs": {"hamiltonian": h_meta, "pseudometric": p_meta},
        "tolerances": {
            "tol_eig": sys_.tol_eig,
            "tol_reality": args.tol_reality,
            "tol_cert": args.tol_cert,
        },
        "verdict": str(cls.verdict),
        "status": status,
        "pseudometric_signature": list(result.P.signature),
        "certificates": result.certificates(),
        "eigenvalues": rows,
    }
    if result.metric is not None:
        report["metric"] = {"construction": "biorthogonal left vectors, scales |kappa|^-1/2 (Theta = P C)"}
    return report, code


def cmd_analyze(args) -> int:
    report, code = build_report(args)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return code


def _grid_from(args) -> np.ndarray:
    if args.steps < 1:
        raise InvalidGrid("--steps must be at least 1")
    if not args.t_max > 0:
        raise InvalidGrid("--t-max must be positive")
    return np.linspace(0.0, args.t_max, args.steps + 1)


def cmd_evolve(args) -> int:
    H, h_meta, P, p_meta = _load_pair(args)
    psi0, s_meta = read_state(args.state)
    result = analyze(H, P, args.tol_eig, args.tol_reality, args.tol_cert)
    header = [
        f"# quasiherm {__version__} evolve picture={args.picture}",
        f"# hamiltonian {h_meta['label']} sha256={h_meta['sha256']}",
        f"# pseudometric {p_meta['label']} sha256={p_meta['sha256']}",
        f"# state {s_meta['label']} sha256={s_meta['sha256']}",
    ]
    code = EXIT_OK
    if result.verdict == Verdict.UNBROKEN and result.certified:
        theta = result.metric
        header.append(
            "# theta: biorthogonal metric with Theta = P C normalization; "
            f"quasi_h_residual={csv_line([theta.quasi_h_residual])} "
            f"min_eigenvalue={csv_line([theta.min_eigenvalue])} condition={csv_line([theta.condition])}"
        )
    elif args.force:
        theta = MetricOperator.identity(H)
        code = EXIT_BROKEN
        header.append(
            f"# WARNING: {result.verdict} spectrum, no positive metric; theta = identity (F-norm bookkeeping only); "
            f"max |Im E| = {csv_line([result.classification.max_imag])}"
        )
    else:
        sys.stderr.write(
            f"error: verdict {result.verdict} ({'not certified' if result.verdict == Verdict.UNBROKEN else 'no positive metric'}); "
            "rerun with --force for F-norm bookkeeping\n"
        )
        return EXIT_BROKEN if result.verdict != Verdict.UNBROKEN else EXIT_ERROR

    observables = [("energy", H)]
    for path in args.observable or []:
        X, meta = read_operator(path)
        if X.shape != H.shape:
            raise DimensionMismatch(f"observable {path} has dim {X.shape[0]}")
        observables.append((meta["label"], X))

    t = _grid_from(args)
    T = theta.theta
    if psi0.shape != (H.shape[0],):
        raise DimensionMismatch(f"state dim {psi0.shape[0]} != hamiltonian dim {H.shape[0]}")
    if not np.any(psi0):
        raise ValueError("initial state is zero")
    # start from a unit state in the metric used for bookkeeping
    psi0 = psi0 / np.sqrt(np.vdot(psi0, T @ psi0).real)
    traj = evolve_schrodinger(H, psi0, t, theta)
    # expectations normalized by the S-norm: of psi(t) (Schroedinger) or psi0 (Heisenberg)
    values = []
    for _, X in observables:
        if args.picture == "schrodinger":
            num = np.einsum("ki,ij,kj->k", traj.states.conj(), T @ X, traj.states)
            values.append(num / traj.s_norms**2)
        else:
            heis = evolve_heisenberg(H, X, t)
            num = np.einsum("i,ij,kjl,l->k", psi0.conj(), T, heis.states, psi0)
            values.append(num / traj.s_norms[0] ** 2)
    if code == EXIT_BROKEN:
        header.append(f"# growth_rate(log f_norm slope)={csv_line([traj.growth_rate])}")

    columns = ["t", "s_norm", "f_norm"]
    for label, _ in observables:
        columns += [f"re_{label}", f"im_{label}"]
    lines = header + [",".join(columns)]
    for k in range(len(t)):
        row = [t[k], traj.s_norms[k], traj.f_norms[k]]
        for v in values:
            row += [v[k].real, v[k].imag]
        lines.append(csv_line(row))
    _emit("\n".join(lines) + "\n", args.out)
    return code


def parse_axis(spec: str) -> tuple[str, list[float]]:
    """``name=start:stop:step`` (inclusive), ``name=v1,v2,...`` or ``name=v``."""
    if "=" not in spec:
        raise InvalidGrid(f"grid axis {spec!r} must look like name=start:stop:step or name=v1,v2")
    name, body = spec.split("=", 1)
    name = name.strip()
    try:
        parts = [float(x) for x in body.replace(":", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise InvalidGrid(f"axis {name}: {exc}") from exc
    if ":" in body:
        if len(parts) != 3:
            raise InvalidGrid(f"axis {name}: expected start:stop:step")
        start, stop, step = parts
        if step == 0:
            raise InvalidGrid(f"axis {name}: step must be non-zero")
        count = (stop - start) / step
        if count < -1e-9:
            raise InvalidGrid(f"axis {name}: step sign does not reach stop")
        n = int(np.floor(count + 1e-9)) + 1
        if n > 10**6:
            raise InvalidGrid(f"axis {name}: too many points ({n})")
        values = [start + k * step for k in range(n)]
    else:
        values = parts
    if not values:
        raise InvalidGrid(f"axis {name}: empty")
    return name, values


def cmd_sweep(args) -> int:
    family = FAMILY_ALIASES.get(args.family.lower(), args.family)
    if family not in FAMILIES:
        raise InvalidGrid(f"unknown family {args.family!r}")
    grid = dict(parse_axis(s) for s in args.param)
    names = FAMILIES[family]
    unknown = set(grid) - set(names)
    if unknown:
        raise InvalidGrid(f"unknown parameters {sorted(unknown)} for {family}")
    rows = sweep_phase_diagram(family, grid, args.tol_reality)
    lines = [",".join([*names, "verdict", "max_im_E", "min_theta_eig"])]
    for r in rows:
        lines.append(csv_line([*(r.params[k] for k in names), r.verdict, r.max_im_E, r.min_theta_eigenvalue]))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors must not collide with the "broken" exit code 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quasiherm", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify H and build the physical metric")
    p.add_argument("hamiltonian")
    p.add_argument("pseudometric", nargs="?", default=None)
    p.add_argument("--out", default=None)
    _add_tolerances(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("evolve", help="time evolution table (CSV)")
    p.add_argument("hamiltonian")
    p.add_argument("state")
    p.add_argument("--pseudometric", default=None)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--picture", choices=("schrodinger", "heisenberg"), default="schrodinger")
    p.add_argument("--observable", action="append", help="extra operator file to track (repeatable)")
    p.add_argument("--force", action="store_true", help="allow broken spectra with identity-metric bookkeeping")
    p.add_argument("--out", default=None)
    _add_tolerances(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sweep", help="phase diagram of a model family (CSV)")
    p.add_argument("--family", required=True, help="PT2Cell|GainLossChain (aliases pt2, chain)")
    p.add_argument("--param", action="append", required=True, metavar="NAME=SPEC", help="grid axis, repeatable")
    p.add_argument("--tol-reality", type=float, default=REALITY_TOL)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QuasiHermError as exc:
        sys.stderr.write(f"error: {qualified_name(exc)}: {exc}\n")
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
