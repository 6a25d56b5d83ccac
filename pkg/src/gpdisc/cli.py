"""Command-line front end.

Subcommands mirror the library layers: `tf` (closed-form reference
profiles), `field energy` (evaluate a saved field), `trial-energy` (build
a trial family and report its energies), `minimize` (constrained descent),
`symmetry` (restricted radial branch), and `sweep` (batch runs from a YAML
config).  Results are printed as JSON on stdout and optionally written to
record files, so everything here is scriptable.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import field as field_mod
from ._version import __version__
from .minimize import MinimizeOptions, minimize
from .runner import load_config, run_sweep
from .symmetry import symmetric_branch_energy
from .tf import FastRegime, FixedRegime, density_normalization, tf_energy_quadrature, tf_solve
from .trial import (
    GiantTrial,
    GiantTrialSpec,
    LatticeTrialSpec,
    build_giant_vortex_trial,
    build_lattice_trial,
    trial_tf_energy_check,
)


def _emit(record: dict, out: str | None) -> None:
    text = json.dumps(record, indent=2, sort_keys=True)
    print(text)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")


def _breakdown_dict(bd) -> dict:
    return dataclasses.asdict(bd)


# ------------------------------------------------------------------ tf


def _cmd_tf(args) -> int:
    if args.regime == "fixed":
        params = FixedRegime(args.omega)
    else:
        if args.alpha is None or args.eps is None:
            print("fast regime requires --alpha and --eps", file=sys.stderr)
            return 2
        params = FastRegime(args.omega, args.alpha, args.eps)
    sol = tf_solve(params)
    record = {
        "regime": args.regime,
        "omega": args.omega,
        "alpha": args.alpha,
        "eps": args.eps,
        "energy": sol.energy,
        "energy_quadrature": tf_energy_quadrature(sol),
        "hole_radius": sol.hole_radius,
        "boundary_radius": sol.boundary_radius,
        "normalization": density_normalization(sol),
    }
    _emit(record, None)
    if args.emit_density:
        r = np.linspace(0.0, 1.0, args.samples)
        rho = sol.density(r)
        lines = ["r,density"] + [f"{float(ri)!r},{float(di)!r}" for ri, di in zip(r, rho)]
        Path(args.emit_density).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


# ------------------------------------------------------------------ field


def _cmd_field_energy(args) -> int:
    fld = field_mod.load_field(args.infile)
    result = field_mod.gp_energy(fld, args.omega, args.eps, form=args.form)
    if isinstance(result, dict):
        record = {k: _breakdown_dict(v) for k, v in result.items()}
        record["form_agreement"] = abs(result["angular"].total - result["magnetic"].total)
    else:
        record = _breakdown_dict(result)
    record["norm"] = field_mod.norm(fld)
    record["angular_momentum"] = field_mod.angular_momentum(fld)
    _emit(record, None)
    return 0


# ------------------------------------------------------------------ trial


def _cmd_trial_energy(args) -> int:
    grid = field_mod.make_grid(args.nr, args.ntheta, args.bc)
    if args.family == "lattice":
        spec = LatticeTrialSpec(args.omega, args.eps, delta=args.delta, eta=args.eta)
        trial = build_lattice_trial(spec, grid)
        omega_eff = args.omega / args.eps
        scale = args.eps ** 2
        extra = {"lattice_count": trial.lattice.count, "delta": trial.spec.delta}
    else:
        if args.alpha is None:
            print("giant family requires --alpha", file=sys.stderr)
            return 2
        spec = GiantTrialSpec(args.omega, args.eps, args.alpha, beta=args.beta)
        trial = build_giant_vortex_trial(spec, grid)
        omega_eff = args.omega / args.eps ** (1.0 + args.alpha)
        scale = args.eps ** (2.0 + 2.0 * args.alpha)
        extra = {"winding": trial.winding, "beta": trial.spec.beta}
    both = field_mod.gp_energy(trial.field, omega_eff, args.eps, form="both")
    record = {
        "family": args.family,
        "eps": args.eps,
        "omega": args.omega,
        "omega_eff": omega_eff,
        "c_sq": trial.c_sq,
        "energy": both["angular"].total,
        "energy_magnetic": both["magnetic"].total,
        "tf_energy": trial.tf.energy,
        "residual": scale * both["angular"].total - trial.tf.energy,
        "tf_functional_excess": trial_tf_energy_check(trial.field, trial.tf.regime),
        "anisotropy": field_mod.anisotropy_index(trial.field),
    }
    record.update(extra)
    _emit(record, args.out)
    return 0


# ------------------------------------------------------------------ minimize


def _cmd_minimize(args) -> int:
    grid = field_mod.make_grid(args.nr, args.ntheta, args.bc)
    if args.init == "trial":
        # Fixed-regime reading of the effective rotation: omega0 = eps*Omega.
        spec = LatticeTrialSpec(args.eps * args.omega, args.eps)
        initial = build_lattice_trial(spec, grid).field
    elif args.init == "random":
        initial = field_mod.random_field(grid, args.seed)
    elif args.init.startswith("file:"):
        initial = field_mod.load_field(args.init[len("file:"):])
        if initial.grid.n_r != grid.n_r or initial.grid.n_theta != grid.n_theta:
            print("initial field grid does not match --nr/--ntheta", file=sys.stderr)
            return 2
    else:
        print(f"unknown init {args.init!r}", file=sys.stderr)
        return 2
    options = MinimizeOptions(max_iters=args.max_iters, tol=args.tol, seed=args.seed)
    result = minimize(initial, args.omega, args.eps, options)
    both = field_mod.gp_energy(result.field, args.omega, args.eps, form="both")
    record = {
        "eps": args.eps,
        "omega": args.omega,
        "bc": args.bc,
        "init": args.init,
        "energy": result.energy.total,
        "energy_magnetic": both["magnetic"].total,
        "form_agreement": abs(both["angular"].total - both["magnetic"].total),
        "residual": result.residual,
        "iterations": result.iterations,
        "converged": result.converged,
        "mu": result.mu,
        "anisotropy": field_mod.anisotropy_index(result.field),
        "angular_momentum": field_mod.angular_momentum(result.field),
    }
    _emit(record, args.out)
    if args.save_field:
        field_mod.save_field(result.field, args.save_field)
    return 0


# ------------------------------------------------------------------ symmetry


def _cmd_symmetry(args) -> int:
    branch = symmetric_branch_energy(args.eps, args.omega, n_max=args.nmax)
    print("n,E_n,E_restricted")
    for n, e_n, e_res in branch.table:
        print(f"{n},{e_n!r},{e_res!r}")
    record = {
        "eps": args.eps,
        "omega": args.omega,
        "n_max": args.nmax,
        "best_n": branch.best_n,
        "energy": branch.energy,
        "seed_hint": branch.seed_hint,
        "window_warning": branch.window_warning,
        "table": [list(row) for row in branch.table],
    }
    if args.out:
        Path(args.out).write_text(
            json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0


# ------------------------------------------------------------------ sweep


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    records = run_sweep(config)
    failures = 0
    for rec in records:
        status = "error" if rec.error else "ok"
        if rec.error:
            failures += 1
        print(f"eps={rec.eps:g} omega_eff={rec.omega_eff:g} {status}")
    print(f"wrote {len(records)} records to {config.output_dir}")
    return 0 if failures == 0 else 1


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpdisc",
        description="Rotating Bose-Einstein condensates in a flat disc trap",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_tf = sub.add_parser("tf", help="closed-form TF reference profile")
    p_tf.add_argument("--regime", choices=("fixed", "fast"), required=True)
    p_tf.add_argument("--omega", type=float, required=True)
    p_tf.add_argument("--alpha", type=float, default=None)
    p_tf.add_argument("--eps", type=float, default=None)
    p_tf.add_argument("--emit-density", default=None, metavar="PATH")
    p_tf.add_argument("--samples", type=int, default=256)
    p_tf.set_defaults(fn=_cmd_tf)

    p_field = sub.add_parser("field", help="operate on a saved field")
    field_sub = p_field.add_subparsers(dest="field_command", required=True)
    p_energy = field_sub.add_parser("energy", help="evaluate the energy of a saved field")
    p_energy.add_argument("--in", dest="infile", required=True)
    p_energy.add_argument("--omega", type=float, required=True)
    p_energy.add_argument("--eps", type=float, required=True)
    p_energy.add_argument("--form", choices=("angular", "magnetic", "both"), default="both")
    p_energy.set_defaults(fn=_cmd_field_energy)

    p_trial = sub.add_parser("trial-energy", help="build a trial field and report energies")
    p_trial.add_argument("--family", choices=("lattice", "giant"), required=True)
    p_trial.add_argument("--eps", type=float, required=True)
    p_trial.add_argument("--omega", type=float, required=True,
                         help="regime coefficient (omega0 for lattice, omega1 for giant)")
    p_trial.add_argument("--alpha", type=float, default=None)
    p_trial.add_argument("--beta", type=float, default=None)
    p_trial.add_argument("--delta", type=float, default=None)
    p_trial.add_argument("--eta", type=float, default=3.0)
    p_trial.add_argument("--nr", type=int, default=64)
    p_trial.add_argument("--ntheta", type=int, default=128)
    p_trial.add_argument("--bc", choices=("neumann", "dirichlet"), default="neumann")
    p_trial.add_argument("--out", default=None)
    p_trial.set_defaults(fn=_cmd_trial_energy)

    p_min = sub.add_parser("minimize", help="projected gradient descent")
    p_min.add_argument("--eps", type=float, required=True)
    p_min.add_argument("--omega", type=float, required=True, help="effective rotation speed")
    p_min.add_argument("--bc", choices=("neumann", "dirichlet"), default="neumann")
    p_min.add_argument("--init", default="trial", help="trial|random|file:<path>")
    p_min.add_argument("--nr", type=int, default=64)
    p_min.add_argument("--ntheta", type=int, default=128)
    p_min.add_argument("--max-iters", type=int, default=2000)
    p_min.add_argument("--tol", type=float, default=1e-5)
    p_min.add_argument("--seed", type=int, default=0)
    p_min.add_argument("--out", default=None)
    p_min.add_argument("--save-field", default=None)
    p_min.set_defaults(fn=_cmd_minimize)

    p_sym = sub.add_parser("symmetry", help="restricted radial branch scan")
    p_sym.add_argument("--eps", type=float, required=True)
    p_sym.add_argument("--omega", type=float, required=True)
    p_sym.add_argument("--nmax", type=int, default=None)
    p_sym.add_argument("--out", default=None)
    p_sym.set_defaults(fn=_cmd_symmetry)

    p_sweep = sub.add_parser("sweep", help="batch runs from a YAML config")
    p_sweep.add_argument("--config", required=True)
    p_sweep.set_defaults(fn=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
