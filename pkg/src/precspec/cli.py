"""Command-line front end.

Every subcommand builds a :class:`ProblemConfig` from an optional JSON file
plus flag overrides, runs one experiment and writes CSV (and for
``reproduce-paper`` SVG) files into ``--out-dir``.

Exit codes: 0 success, 1 validation or numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import output
from .analysis import (
    convergence_study,
    perturbation_experiment,
    refinement_study,
    solve_eigs,
    weyl_sequence_demo,
)
from .errors import EvaluationError, NumericalError, ParseError, ValidationError
from .localization import find_matching, nodal_pairing_report, node_intervals
from .mesh import write_mesh
from .problem import ProblemConfig

__all__ = ["build_parser", "run", "main"]

_FAILURES = (ValidationError, NumericalError, EvaluationError, ParseError, OSError)


def _floats(text):
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON problem configuration")
    common.add_argument("--nx", type=int, help="cells in x")
    common.add_argument("--ny", type=int, help="cells in y")
    common.add_argument("--k", metavar="EXPR", help="coefficient k(x, y)")
    common.add_argument("--g", metavar="EXPR", help="coefficient g(x, y)")
    common.add_argument("--bc", choices=["dirichlet", "neumann"])
    common.add_argument("--quad", choices=["centroid", "midpoint3"])
    common.add_argument("--out-dir", metavar="DIR", default=".", help="output directory")
    common.add_argument("--tol", type=float, metavar="X", help="matching tolerance")

    p = argparse.ArgumentParser(prog="precspec",
                                description="Spectra of preconditioned P1 elliptic pencils.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", required=True)

    sub.add_parser("mesh", parents=[common], help="write the structured mesh as JSON")
    sub.add_parser("eig", parents=[common], help="generalized eigenvalues -> eigs.csv")
    sub.add_parser("localize", parents=[common],
                   help="nodal intervals and eigenvalue matching -> localize.csv")
    s = sub.add_parser("study", parents=[common], help="refinement study -> study.csv")
    s.add_argument("--levels", type=int, default=3, metavar="L")
    s = sub.add_parser("perturb", parents=[common], help="local perturbation -> perturb.csv")
    s.add_argument("--nodes", type=_ints, required=True, metavar="J",
                   help="node indices, comma separated")
    s.add_argument("--K", type=float, help="constant ratio on the perturbed supports")
    s = sub.add_parser("weyl", parents=[common], help="Weyl bump residuals -> weyl.csv")
    s.add_argument("--x0", type=_floats, default=[0.0, 0.0], metavar="X,Y")
    s.add_argument("--radii", type=_floats, default=[0.5, 0.25, 0.125], metavar="R,...")
    s.add_argument("--lambda0", type=float)
    s = sub.add_parser("converge", parents=[common],
                       help="Galerkin and pointwise convergence -> converge.csv")
    s.add_argument("--w", metavar="EXPR", default="sin(pi*x)*sin(pi*y)")
    s.add_argument("--levels", type=int, default=4, metavar="L")
    sub.add_parser("reproduce-paper", parents=[common],
                   help="Gaussian-bump experiment: eigs.csv, localize.csv, plot.svg")
    return p


def _config(args) -> ProblemConfig:
    cfg = ProblemConfig.from_json(args.config) if args.config else ProblemConfig()
    return cfg.with_overrides(nx=args.nx, ny=args.ny, k=args.k, g=args.g, bc=args.bc,
                              quadrature=args.quad)


def _out_dir(args) -> Path:
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _localize(cfg, args, out):
    pencil = cfg.assemble()
    eigs = solve_eigs(pencil)
    ivs = node_intervals(pencil, cfg.ratio)
    match = find_matching(eigs, ivs, args.tol)
    output.write_localize_csv(out / "localize.csv", ivs, eigs, match)
    return pencil, eigs, ivs, match


def _cmd_mesh(cfg, args, out):
    mesh = cfg.mesh()
    write_mesh(out / "mesh.json", mesh)
    print(f"{mesh.n_nodes} nodes, {mesh.n_triangles} triangles")
    return 0


def _cmd_eig(cfg, args, out):
    eigs = solve_eigs(cfg.assemble())
    output.write_eigs_csv(out / "eigs.csv", eigs)
    print(f"{len(eigs)} eigenvalues in [{float(eigs.values[0])!r}, {float(eigs.values[-1])!r}]")
    return 0


def _cmd_localize(cfg, args, out):
    _, eigs, ivs, match = _localize(cfg, args, out)
    if not match.perfect:
        print(f"no perfect matching: {len(match.witness_nodes)} nodes against "
              f"{match.count_in_union} eigenvalues violate Hall's condition "
              f"(nodes {match.witness_nodes})", file=sys.stderr)
        return 1
    print(f"perfect matching of {match.size} eigenvalues to {len(ivs)} intervals")
    return 0


def _cmd_study(cfg, args, out):
    rep = refinement_study(cfg, args.levels)
    output.write_study_csv(out / "study.csv", rep)
    for lv in rep.levels:
        print(f"level {lv.level}: n={lv.n_dofs} fill={lv.fill_distance:.4g} "
              f"max width={lv.max_width:.4g}")
    return 0


def _cmd_perturb(cfg, args, out):
    rep = perturbation_experiment(cfg, args.nodes, args.K)
    output.write_perturb_csv(out / "perturb.csv", rep)
    print(f"K={rep.K!r} multiplicity={rep.multiplicity} (need {rep.expected}) "
          f"Theta={rep.Theta:.4g} bound={rep.bound:.4g} count={rep.count}")
    return 0 if rep.ok else 1


def _cmd_weyl(cfg, args, out):
    if len(args.x0) != 2:
        raise ValidationError("--x0 needs two coordinates")
    rep = weyl_sequence_demo(cfg, tuple(args.x0), tuple(args.radii), args.lambda0)
    output.write_weyl_csv(out / "weyl.csv", rep)
    for r in rep.rows:
        print(f"r={r.radius:g}: |u_r|_B={r.norm_u:.4g} bound={r.bound:.4g}")
    return 0


def _cmd_converge(cfg, args, out):
    rep = convergence_study(cfg, args.w, args.levels)
    output.write_converge_csv(out / "converge.csv", rep)
    for lv in rep.levels:
        print(f"level {lv.level}: quasi-optimality={lv.quasi_optimality:.4g} "
              f"pointwise={lv.pointwise_error:.4g}")
    return 0


def _cmd_reproduce(cfg, args, out):
    pencil, eigs, ivs, match = _localize(cfg, args, out)
    output.write_eigs_csv(out / "eigs.csv", eigs)
    rep = nodal_pairing_report(eigs, ivs, match if match.perfect else None)
    output.pairing_svg(out / "plot.svg", rep.eigenvalues, rep.nodal_values)
    lam = eigs.values
    print(f"{len(lam)} eigenvalues in [{float(lam[0])!r}, {float(lam[-1])!r}]")
    print(f"matching: {match.status}; sorted pairing max |lambda - r| = "
          f"{rep.max_difference:.4g} (max interval width {rep.max_width:.4g})")
    return 0 if match.perfect and np.isfinite(lam).all() else 1


_COMMANDS = {
    "mesh": _cmd_mesh,
    "eig": _cmd_eig,
    "localize": _cmd_localize,
    "study": _cmd_study,
    "perturb": _cmd_perturb,
    "weyl": _cmd_weyl,
    "converge": _cmd_converge,
    "reproduce-paper": _cmd_reproduce,
}


def run(argv=None) -> int:
    """Parse ``argv`` and run one subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        out = _out_dir(args)
        return _COMMANDS[args.command](cfg, args, out)
    except _FAILURES as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())
