"""Command-line interface.

Subcommands:
    solve     integrate a configuration file and write snapshots
    params    derive wave speeds, nonlinearity coefficient, sign branch,
              and canonical scale factors from material constants
    soliton   print the analytic line-soliton speed or profile samples
    shock     shock-formation distance of the dispersionless 1D reduction
    validate  run the acceptance suite and print a pass/fail table

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 runtime
instability.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import analytic, solver, transforms
from .errors import (ConfigError, GridError, InstabilityError, KPError,
                     SnapshotFormatError)
from .materials import (MaterialCompressible, MaterialIncompressible,
                        beta_quadratic, beta3_landau, spec_from_compressible,
                        spec_from_incompressible, speed_identity_residual,
                        wave_speeds)
from .snapio import parse_config, write_snapshot

USAGE_ERROR = 2
VALIDATION_FAILURE = 1
INSTABILITY = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kpwaves",
        description="Spectral solver for the canonical KP equations of "
                    "plane elastodynamics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="integrate a configuration file")
    p_solve.add_argument("--config", required=True, help="configuration file")
    p_solve.add_argument("--out", default=None, help="output directory "
                         "(default: out_dir from the config)")
    p_solve.add_argument("--format", default=None, choices=["csv", "f64le"],
                         help="snapshot format (default: from the config)")

    p_par = sub.add_parser("params", help="coefficients from material constants")
    p_par.add_argument("--model", required=True,
                       choices=["compressible", "incompressible"])
    p_par.add_argument("--mu", type=float, required=True, help="shear modulus (Pa)")
    p_par.add_argument("--rho0", type=float, default=1.0, help="density (kg/m^3)")
    p_par.add_argument("--lambda", dest="lam", type=float, default=None,
                       help="first Lame constant (Pa, compressible)")
    p_par.add_argument("--alpha1", type=float, default=None)
    p_par.add_argument("--alpha2", type=float, default=None)
    p_par.add_argument("--gamma0", type=float, default=None,
                       help="defaults to mu")
    p_par.add_argument("--gamma1", type=float, default=None)
    p_par.add_argument("--gamma2", type=float, default=None)
    p_par.add_argument("--A", type=float, default=None,
                       help="third-order Landau constant (incompressible)")
    p_par.add_argument("--D", type=float, default=None,
                       help="fourth-order Landau constant (incompressible)")
    p_par.add_argument("--nu0", type=float, default=None,
                       help="dimensionless dispersion parameter")
    p_par.add_argument("--nu", type=float, default=None,
                       help="physical dispersion parameter (Pa s^2)")
    p_par.add_argument("--length-scale", dest="length_scale", type=float,
                       default=None, help="characteristic length L (m)")
    p_par.add_argument("--epsilon", type=float, default=None,
                       help="expansion parameter")

    p_sol = sub.add_parser("soliton", help="analytic line-soliton data")
    p_sol.add_argument("--equation", required=True, choices=["quad", "cubic"])
    p_sol.add_argument("--kappa", type=float, required=True)
    p_sol.add_argument("--theta", type=float, default=0.0)
    p_sol.add_argument("--x0", type=float, default=0.0)
    p_sol.add_argument("--branch", default="plus", choices=["plus", "minus"])
    p_sol.add_argument("--t", type=float, default=0.0)
    p_sol.add_argument("--y", type=float, default=0.0)
    p_sol.add_argument("--samples", type=int, default=None,
                       help="print this many profile samples instead of the speed")
    p_sol.add_argument("--xmin", type=float, default=-4 * np.pi)
    p_sol.add_argument("--xmax", type=float, default=4 * np.pi)

    p_shk = sub.add_parser("shock", help="dispersionless shock-formation distance")
    p_shk.add_argument("--equation", required=True, choices=["quad", "cubic"])
    p_shk.add_argument("--coeff", type=float, required=True,
                       help="nonlinearity coefficient (beta or beta3)")
    p_shk.add_argument("--profile", required=True,
                       help="text file of whitespace-separated samples over "
                            "one period")
    p_shk.add_argument("--period", type=float, default=2 * np.pi,
                       help="period of the sampled profile")

    p_val = sub.add_parser("validate", help="run the acceptance suite")
    p_val.add_argument("--fast", action="store_true",
                       help="consume pre-computed solve outputs for the long "
                            "soliton runs instead of re-running them")
    p_val.add_argument("--runs", default="out",
                       help="directory scanned for solve outputs in fast mode")
    return parser


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _cmd_params(args) -> int:
    if args.model == "compressible":
        needed = {"lambda": args.lam, "alpha1": args.alpha1,
                  "alpha2": args.alpha2, "gamma1": args.gamma1,
                  "gamma2": args.gamma2}
        missing = [k for k, v in needed.items() if v is None]
        if missing:
            print(f"error: compressible model requires --{', --'.join(missing)}",
                  file=sys.stderr)
            return USAGE_ERROR
    else:
        missing = [k for k in ("A", "D") if getattr(args, k) is None]
        if missing:
            print(f"error: incompressible model requires --{', --'.join(missing)}",
                  file=sys.stderr)
            return USAGE_ERROR

    phys = (args.nu, args.length_scale, args.epsilon)
    if args.nu0 is None and any(v is None for v in phys):
        print("error: give --nu0, or all of --nu, --length-scale, --epsilon",
              file=sys.stderr)
        return USAGE_ERROR

    if args.model == "compressible":
        gamma0 = args.mu if args.gamma0 is None else args.gamma0
        common = dict(lam=args.lam, mu=args.mu, rho0=args.rho0,
                      alpha1=args.alpha1, alpha2=args.alpha2, gamma0=gamma0,
                      gamma1=args.gamma1, gamma2=args.gamma2)
        if args.nu0 is not None:
            m = MaterialCompressible(nu0=args.nu0, **common)
        else:
            m = MaterialCompressible.with_physical_nu(
                nu=args.nu, L=args.length_scale, epsilon=args.epsilon, **common)
        c_l, c_t = wave_speeds(m)
        spec = spec_from_compressible(m)
        print(f"c_ell = {_fmt(c_l)}")
        print(f"c_t = {_fmt(c_t)}")
        print(f"identity_residual = {speed_identity_residual(m):.3g}")
        print(f"beta = {_fmt(beta_quadratic(m))}")
    else:
        common = dict(mu=args.mu, rho0=args.rho0, A=args.A, D=args.D)
        if args.nu0 is not None:
            m = MaterialIncompressible(nu0=args.nu0, **common)
        else:
            m = MaterialIncompressible.with_physical_nu(
                nu=args.nu, L=args.length_scale, epsilon=args.epsilon, **common)
        print(f"c_t = {_fmt(math.sqrt(m.mu / m.rho0))}")
        spec = spec_from_incompressible(m)
        print(f"beta3 = {_fmt(beta3_landau(m.mu, m.A, m.D))}")

    scaling = transforms.scale_factors(spec)
    print(f"branch = {spec.sign_branch}")
    print(f"nu0 = {_fmt(spec.nu0)}")
    print(f"s_t = {_fmt(scaling.s_t)}")
    print(f"s_x = {_fmt(scaling.s_x)}")
    print(f"s_y = {_fmt(scaling.s_y)}")
    return 0


def _cmd_soliton(args) -> int:
    kind = "quadratic" if args.equation == "quad" else "cubic"
    try:
        p = analytic.SolitonParams(kappa=args.kappa, theta=args.theta,
                                   x0=args.x0, branch=args.branch)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if args.samples is None:
        print(f"speed {_fmt(analytic.soliton_speed(kind, args.kappa, args.theta))}")
        return 0
    if args.samples < 2 or args.xmax <= args.xmin:
        print("error: need --samples >= 2 and xmax > xmin", file=sys.stderr)
        return USAGE_ERROR
    x = np.linspace(args.xmin, args.xmax, args.samples)
    u = analytic.line_soliton(kind, p, args.t, x, args.y)
    for xi, ui in zip(x, u):
        print(f"{xi!r} {ui!r}")
    return 0


def _cmd_shock(args) -> int:
    kind = "quadratic" if args.equation == "quad" else "cubic"
    try:
        profile = np.loadtxt(args.profile, ndmin=1)
    except OSError as exc:
        print(f"error: cannot read profile: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ValueError as exc:
        print(f"error: malformed profile file: {exc}", file=sys.stderr)
        return USAGE_ERROR
    chi = analytic.shock_distance(profile, kind, args.coeff, args.period)
    if chi is None:
        print("no shock")
    else:
        print(f"shock_distance {_fmt(chi)}")
    return 0


def _cmd_solve(args) -> int:
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return USAGE_ERROR
    cfg = parse_config(text)
    out_dir = Path(args.out if args.out is not None else cfg.out_dir)
    fmt = args.format if args.format is not None else cfg.fmt
    out_dir.mkdir(parents=True, exist_ok=True)

    grid = solver.make_grid(cfg.nx, cfg.ny, (cfg.xmin, cfg.xmax, cfg.ymin, cfg.ymax))
    spec = cfg.equation_spec()
    if spec.kind != cfg.equation:
        raise ConfigError([(None, f"material model implies a {spec.kind} "
                                  f"equation but the config says {cfg.equation}")])
    initial = _initial_field(cfg, grid, spec)
    solver_cfg = solver.SolverConfig(
        spec=spec, grid=grid, dt=cfg.dt, t_end=cfg.t_end, eps_reg=cfg.eps_reg,
        zero_mode_policy=cfg.zero_mode_policy, dealias=cfg.dealias,
        snapshot_times=cfg.snapshot_times, diag_stride=cfg.diag_stride,
        digest=cfg.digest)

    ext = "f64le" if fmt == "f64le" else "csv"
    try:
        snapshots, series = solver.run(solver_cfg, initial)
    except InstabilityError as exc:
        if exc.last_snapshot is not None:
            path = out_dir / f"last_finite.{ext}"
            write_snapshot(exc.last_snapshot, path, fmt)
            print(f"error: {exc}; last finite snapshot written to {path}",
                  file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return INSTABILITY

    for i, snap in enumerate(snapshots):
        path = out_dir / f"snap_{i:03d}.{ext}"
        write_snapshot(snap, path, fmt)
        print(f"wrote {path} (t={snap.sim_time!r})")
    last = series[-1].stats
    print(f"final: mean={last.mean:.6e} l2={last.l2_norm:.6e} "
          f"min={last.min:.6e} max={last.max:.6e}")
    return 0


def _initial_field(cfg, grid, spec) -> solver.Field2D:
    if cfg.initial.startswith("soliton"):
        p = analytic.SolitonParams(kappa=cfg.kappa, theta=cfg.theta, x0=cfg.x0,
                                   branch=spec.sign_branch)
        kind = "quadratic" if cfg.initial == "soliton_quad" else "cubic"
        return solver.Field2D.from_function(
            grid, lambda X, Y: analytic.line_soliton(kind, p, 0.0, X, Y))
    return solver.Field2D.from_function(
        grid, lambda X, Y: analytic.initial_condition(cfg.initial, X, Y))


def _cmd_validate(args) -> int:
    from . import acceptance
    results = acceptance.run_all(fast=args.fast, runs_dir=args.runs)
    width = max(len(r.name) for r in results)
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"{mark}  {r.name:<{width}}  {r.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return 0 if failed == 0 else VALIDATION_FAILURE


def cli_dispatch(argv) -> int:
    """Run one invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help and usage errors
        return int(exc.code or 0)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "params":
            return _cmd_params(args)
        if args.command == "soliton":
            return _cmd_soliton(args)
        if args.command == "shock":
            return _cmd_shock(args)
        if args.command == "validate":
            return _cmd_validate(args)
        parser.error(f"unknown command {args.command!r}")
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INSTABILITY
    except (ConfigError, SnapshotFormatError, GridError, KPError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return USAGE_ERROR


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
