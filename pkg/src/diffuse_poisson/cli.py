"""Command-line driver for the centred-charge benchmark.

Exit codes: 0 success, 1 configuration error, 2 solver non-convergence.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError, SingularEvaluationError
from .experiment import (
    ExperimentConfig,
    emit_slice,
    format_table,
    is_centred_single,
    observed_orders,
    oracle_profile,
    study_grid,
    write_table,
)
from .grid import write_field
from .solver import SolverConfig


def _int_list(text):
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="diffuse-poisson",
        description="Regularized vs trilinear point-charge Poisson solves in a diffuse dielectric.",
    )
    p.add_argument("--n", type=_int_list, default=[50, 100], help="grid sizes, e.g. '50,100'")
    p.add_argument("--method", choices=["regularized", "trilinear", "both"], default="both")
    p.add_argument("--ri", type=float, default=2.0, help="inner interface radius")
    p.add_argument("--re", type=float, default=5.0, help="outer interface radius")
    p.add_argument("--k", type=float, default=6.0, help="tanh steepness")
    p.add_argument("--eps-in", type=float, default=1.0)
    p.add_argument("--eps-out", type=float, default=80.0)
    p.add_argument("--raw-tanh", action="store_true",
                   help="use the unrescaled tanh band (discontinuous at the band edges)")
    p.add_argument("--charges", help="charge file with 'x y z q' lines")
    p.add_argument("--q", type=float, default=1.0, help="magnitude of the default centred charge")
    p.add_argument("--tol", type=float, default=1e-10, help="CG relative residual tolerance")
    p.add_argument("--max-iter", type=int, default=None, help="CG iteration cap (default 10*N)")
    p.add_argument("--precond", choices=["jacobi", "none"], default="jacobi")
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--slice", action="store_true", help="write z=0 slices of the solutions")
    p.add_argument("--profile", action="store_true", help="write the radial oracle profile")
    p.add_argument("--field", action="store_true", help="write full 3D fields as ASCII")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args) -> ExperimentConfig:
    return ExperimentConfig(
        grid_sizes=args.n,
        method=args.method,
        r_i=args.ri,
        r_e=args.re,
        k=args.k,
        eps_i=args.eps_in,
        eps_e=args.eps_out,
        continuous_interface=not args.raw_tanh,
        charges_path=args.charges,
        q=args.q,
        solver=SolverConfig(args.tol, args.max_iter, args.precond),
        out_dir=args.out,
    )


def run(args) -> int:
    cfg = config_from_args(args)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profile = oracle_profile(cfg) if is_centred_single(cfg.charges()) else None
    if args.profile:
        if profile is None:
            raise ConfigError("--profile needs a single charge at the origin")
        profile.write_csv(out / "radial_profile.csv")

    rows, ok = [], True
    for n in cfg.grid_sizes:
        res = study_grid(cfg, n, profile)
        ok &= res.converged
        for name, rep in res.reports.items():
            print(f"N={n} {name}: {rep.iterations} iterations, "
                  f"residual {rep.final_relative_residual:.2e}, {rep.wall_time:.1f}s")
        for tag, f in (("u_rf", res.u_rf), ("u_tl", res.u_tl)):
            if f is None:
                continue
            if args.slice:
                emit_slice(f, out / f"slice_{tag}_N{n}.csv")
            if args.field:
                write_field(f, out / f"{tag}_N{n}.txt")
        rows += res.rows
    if rows:
        rows = observed_orders(rows)
        write_table(rows, out / "convergence.csv")
        print(format_table(rows))
    if not ok:
        print("error: linear solver did not converge", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except (ConfigError, SingularEvaluationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
