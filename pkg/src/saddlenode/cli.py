"""Command-line front end: period and Dulac scans, verification sweeps, critical periods.

Every output starts with the artifact version and the fully resolved
configuration, so a file can be regenerated from its own header. Exit codes:
0 success, 1 configuration error, 2 partial failure or inconclusive cells,
3 failed verification thresholds.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from ._parallel import WORKERS_ENV
from .checks import CHECKS, run_checks
from .dulac import EPS0, S0, fit_c0_c1, slope_scan
from .errors import SaddleNodeError
from .fields import LoudParams, build_loud_unfolding
from .integrator import IntegratorConfig
from .period import (
    U_MAX,
    CellError,
    boundary_monotonicity_check,
    period_scan,
    period_scan_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2
EXIT_THRESHOLD = 3


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which is reserved for partial failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty number list")
    return values


def _header(config: dict) -> str:
    return (f"# saddlenode {__version__}\n"
            f"# config={json.dumps(config, sort_keys=True)}\n")


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _integrator(args) -> IntegratorConfig:
    return IntegratorConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol)


def _require_admissible(a: LoudParams):
    if not a.is_admissible():
        raise ConfigError(f"a=(D={a.D}, F={a.F}) is outside the admissible box")


def cmd_period_scan(args) -> int:
    a = LoudParams(args.D, args.F)
    _require_admissible(a)
    if not 0.0 < args.u0_min <= args.u0_max < 1.0:
        raise ConfigError("need 0 < u0-min <= u0-max < 1")
    if args.n < 1:
        raise ConfigError("n must be positive")
    config = _integrator(args)
    grid = [float(u) for u in np.linspace(args.u0_min, args.u0_max, args.n)]
    resolved = {"command": "period-scan", "D": a.D, "F": a.F, "u0_grid": grid,
                "integrator": asdict(config)}
    results = period_scan(a, grid, config, workers=args.workers)
    _emit(_header(resolved) + period_scan_csv(a, results), args.out)
    return EXIT_PARTIAL if any(isinstance(r, CellError) for r in results) else EXIT_OK


def cmd_dulac_scan(args) -> int:
    params = [LoudParams(D, F) for D in args.D_grid for F in args.F_grid]
    for a in params:
        _require_admissible(a)
    s_grid = list(args.s_grid)
    if any(not 0.0 < s <= args.s0 for s in s_grid):
        raise ConfigError(f"s values must lie in (0, {args.s0}]")
    config = _integrator(args)
    resolved = {"command": "dulac-scan", "D_grid": args.D_grid, "F_grid": args.F_grid,
                "s_grid": s_grid, "degree": args.degree, "s0": args.s0, "eps0": args.eps0,
                "integrator": asdict(config)}
    scan = slope_scan(_family(args.degree), params, s_grid, config=config, workers=args.workers,
                      s0=args.s0, eps0=args.eps0)
    _emit(_header(resolved) + scan.to_csv(), args.out)
    failed = bool(scan.failures)
    if args.fit:
        fit_grid = sorted(s_grid, reverse=True)
        fits = []
        for a in params:
            entry = {"D": a.D, "F": a.F}
            try:
                entry.update(fit_c0_c1(build_loud_unfolding(a, args.degree), fit_grid,
                                       config).to_json_obj())
            except (SaddleNodeError, ValueError) as exc:
                entry.update(status=type(exc).__name__, message=str(exc))
                failed = True
            fits.append(entry)
        doc = {"artifact_version": __version__, "config": resolved, "fits": fits}
        with open(args.fit, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    return EXIT_PARTIAL if failed else EXIT_OK


class _family:
    """Picklable ``a -> build_loud_unfolding(a, degree)``."""

    def __init__(self, degree: int):
        self.degree = degree

    def __call__(self, a):
        return build_loud_unfolding(a, self.degree)


def cmd_verify(args) -> int:
    names = [n.strip() for n in args.checks.split(",") if n.strip()]
    unknown = [n for n in names if n not in CHECKS]
    if unknown or not names:
        raise ConfigError(f"unknown checks {unknown}; choose from {','.join(CHECKS)}")
    if args.points < 1:
        raise ConfigError("points must be positive")
    resolved = {"command": "verify", "checks": names, "points": args.points, "seed": args.seed}
    results = run_checks(names, args.points, args.seed)
    lines = [f"{'check':<12} {'samples':>8} {'max_residual':>14} {'threshold':>10}  result"]
    for r in results:
        lines.append(f"{r.name:<12} {r.samples:>8d} {r.max_residual:>14.6e} "
                     f"{r.threshold:>10.1e}  {'PASS' if r.passed else 'FAIL'}")
    _emit(_header(resolved) + "\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_THRESHOLD


def cmd_critical_periods(args) -> int:
    lo, hi = args.window
    if not 0.0 < lo <= hi < 1.0:
        raise ConfigError("window must satisfy 0 < lo <= hi < 1")
    if not -1.0 < args.D0 < 0.0 or not 0.0 < args.delta < 0.5:
        raise ConfigError("need -1 < D0 < 0 and 0 < delta < 0.5")
    if not (-1.0 < args.D0 - args.delta and args.D0 + args.delta < 0.0):
        raise ConfigError("D0 +/- delta leaves the admissible box")
    config = _integrator(args)
    resolved = {"command": "critical-periods", "D0": args.D0, "delta": args.delta,
                "window": [lo, hi], "n_D": args.n_D, "n_F": args.n_F, "n_u": args.n_u,
                "integrator": asdict(config)}
    report = boundary_monotonicity_check(args.D0, args.delta, args.n_D, args.n_F, (lo, hi),
                                         args.n_u, config, workers=args.workers)
    doc = {"artifact_version": __version__, "config": resolved, **report.to_json_obj()}
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_PARTIAL if report.inconclusive else EXIT_OK


def _window(text: str) -> tuple[float, float]:
    values = _float_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError("window needs two numbers lo,hi")
    return values[0], values[1]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="saddlenode", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, integrator=True):
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if integrator:
            p.add_argument("--rel-tol", type=float, default=1e-10)
            p.add_argument("--abs-tol", type=float, default=1e-12)
            p.add_argument("--workers", type=int, default=None,
                           help=f"worker processes (default ${WORKERS_ENV} or CPU count)")

    p = sub.add_parser("period-scan", help="period and its u0-derivative along a u0 grid")
    p.add_argument("--D", type=float, required=True)
    p.add_argument("--F", type=float, required=True)
    p.add_argument("--u0-min", type=float, default=0.1)
    p.add_argument("--u0-max", type=float, default=0.9)
    p.add_argument("--n", type=int, default=9)
    common(p)
    p.set_defaults(func=cmd_period_scan)

    p = sub.add_parser("dulac-scan", help="Dulac time, map and slope over a parameter grid",
                       epilog="negative lists need the '=' form, e.g. --D-grid=-0.8,-0.5")
    p.add_argument("--D-grid", type=_float_list, required=True)
    p.add_argument("--F-grid", type=_float_list, required=True)
    p.add_argument("--s-grid", type=_float_list, default=[0.2, 0.1, 0.05, 0.02, 0.01])
    p.add_argument("--degree", type=int, default=8, help="truncation degree of U")
    p.add_argument("--s0", type=float, default=S0, help="largest admitted s")
    p.add_argument("--eps0", type=float, default=EPS0, help="largest admitted |eps|")
    p.add_argument("--fit", default=None, help="write c0, c1 fits as JSON to this path")
    common(p)
    p.set_defaults(func=cmd_dulac_scan)

    p = sub.add_parser("verify", help="conjugacy, first-integral and Weierstrass checks")
    p.add_argument("--checks", default=",".join(CHECKS))
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    common(p, integrator=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("critical-periods", help="period monotonicity near the outer boundary")
    p.add_argument("--D0", type=float, default=-0.5)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--window", type=_window, default=(0.95, U_MAX))
    p.add_argument("--n-D", type=int, default=3)
    p.add_argument("--n-F", type=int, default=3)
    p.add_argument("--n-u", type=int, default=64)
    common(p)
    p.set_defaults(func=cmd_critical_periods)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and flag errors
        return exc.code
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"saddlenode: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
