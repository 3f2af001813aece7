"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 oracle / assertion failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dispersion_function as df
from . import dispersion_relation as dr
from . import greens_function as gf
from . import poisson_kernels as pk
from . import volterra as vt
from .equilibria import RadialEquilibrium, from_json, maxwellian
from .errors import OracleFailure, VlasovError
from .numerics import fit_power_law
from .validate import run_validation

EXIT_OK, EXIT_USAGE, EXIT_ORACLE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    equilibrium: RadialEquilibrium
    output: Path | None
    format: str = "csv"
    threads: int = 1
    tolerances: dict = field(default_factory=dict)


def parse_grid(text: str) -> np.ndarray:
    """'a:b:n' -> n uniform points from a to b (n >= 1, a <= b)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} is not of the form a:b:n")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"grid {text!r}: {exc}") from None
    if n < 1 or a > b or not (np.isfinite(a) and np.isfinite(b)):
        raise UsageError(f"grid {text!r} needs n >= 1 and a <= b")
    if n == 1:
        return np.array([a])
    return np.linspace(a, b, n)


def _parse_tolerances(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects name=value, got {item!r}")
        try:
            out[key] = float(val)
        except ValueError:
            raise UsageError(f"--tol {item!r}: value is not a number") from None
    return out


# -- output -------------------------------------------------------------------------------
def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))  # shortest round-trip representation
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def write_rows(cfg: RunConfig, header: list[str], rows: list[list]) -> None:
    if cfg.format == "json":
        text = json.dumps([{h: _jsonable(x) for h, x in zip(header, row)} for row in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])
        text = buf.getvalue()
    _emit(cfg, text)


def write_json(cfg: RunConfig, obj) -> None:
    _emit(cfg, json.dumps(obj, indent=1, default=_jsonable) + "\n")


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        cfg.output.write_text(text)


def _pmap(cfg: RunConfig, fn, items):
    # results are returned in grid order regardless of completion order
    if cfg.threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(fn, items))


# -- subcommands -----------------------------------------------------------------------------
def cmd_penrose(cfg, args):
    probes = [float(p) for p in args.probes.split(",") if p.strip()] if args.probes else []
    if any(p <= 0 for p in probes):
        raise UsageError("probes must be positive")
    rep = dr.penrose_check(cfg.equilibrium, probes)
    write_json(cfg, {
        "equilibrium": cfg.equilibrium.label,
        "winding_numbers": {repr(k): v for k, v in rep.winding_numbers.items()},
        "stable": rep.stable,
        "no_probes": rep.no_probes,
    })
    return EXIT_OK if rep.stable else EXIT_ORACLE


def cmd_dispersion(cfg, args):
    rs = parse_grid(args.r_grid)
    if np.any(rs <= 0):
        raise UsageError("r must be positive")
    pts = _pmap(cfg, lambda r: dr.solve_zeta(cfg.equilibrium, float(r)), rs)
    rows = [[p.r, p.omega1, p.omega2, p.m_l.real, p.m_l.imag, p.residual, p.iterations] for p in pts]
    write_rows(cfg, ["r", "omega1", "omega2", "re_m_l", "im_m_l", "residual", "iterations"], rows)
    return EXIT_OK


def cmd_poles(cfg, args):
    xs = parse_grid(args.xi_grid)
    if np.any(xs <= 0):
        raise UsageError("xi must be > 0")
    if args.j < 1:
        raise UsageError("j must be a positive integer")

    def one(x):
        x = float(x)
        if args.j == 2:
            return pk.poles_j2(x)
        if args.j == 3:
            return pk.poles_j3(x)
        if x > args.r0:
            raise UsageError(f"xi = {x} is outside (0, {args.r0}] for j = {args.j}")
        return pk.poles_general(args.j, x, r0=args.r0)

    rows = []
    for ps in _pmap(cfg, one, xs):
        kp = ps.k_plane_poles()
        for i, (z, w) in enumerate(zip(ps.roots, kp)):
            rows.append([ps.xi_abs, i, w.real, w.imag, z.real, z.imag])
    write_rows(cfg, ["xi", "index", "re_root_k", "im_root_k", "re_root_zeta", "im_root_zeta"], rows)
    return EXIT_OK


def cmd_greens(cfg, args):
    tau = parse_grid(args.tau_grid)
    if np.any(tau < 0):
        raise UsageError("tau must be nonnegative")
    if args.xi <= 0:
        raise UsageError("xi must be > 0")
    g = gf.greens(cfg.equilibrium, args.xi, tau, method=args.method, r0=args.r0)
    sm = np.atleast_1d(g.smooth)
    osc = np.atleast_1d(g.oscillatory) if g.oscillatory is not None else np.full(sm.shape, np.nan)
    err = np.atleast_1d(g.error) if g.error is not None else np.full(sm.shape, np.nan)
    rows = [[t, s, o, e] for t, s, o, e in zip(np.atleast_1d(g.tau), sm, osc, err)]
    write_rows(cfg, ["tau", "smooth", "oscillatory", "error"], rows)
    return EXIT_OK


def cmd_volterra(cfg, args):
    if args.xi <= 0:
        raise UsageError("xi must be > 0")
    forcing = vt.ForcingSpec.from_dict(json.loads(Path(args.forcing).read_text())) if args.forcing \
        else vt.ForcingSpec.free_streaming()
    grid = vt.solve_volterra(cfg.equilibrium, forcing, args.xi, args.t_max, args.steps,
                             richardson_extrapolate=args.richardson)
    rows = [[t, r.real, r.imag, h.real, h.imag] for t, r, h in zip(grid.t, grid.rho_hat, grid.h_hat)]
    write_rows(cfg, ["t", "re_rho", "im_rho", "re_h", "im_h"], rows)
    return EXIT_OK


def cmd_forcing_decay(cfg, args):
    forcing = vt.ForcingSpec.from_dict(json.loads(Path(args.forcing).read_text())) if args.forcing \
        else vt.ForcingSpec.free_streaming()
    times = parse_grid(args.t_grid)
    if np.any(times <= 0):
        raise UsageError("decay times must be positive")
    sups = _pmap(cfg, lambda t: vt.sup_norm_h(forcing.g, forcing.q, float(t)), times)
    p, _, _ = fit_power_law(times, sups)
    if cfg.format == "json":
        write_json(cfg, {"exponent": -p, "times": list(times), "sup_h": sups})
    else:
        write_rows(cfg, ["t", "sup_h"], [[t, s] for t, s in zip(times, sups)])
        sys.stderr.write(f"fitted decay exponent {-p!r}\n")
    return EXIT_OK


def cmd_kpath(cfg, args):
    xs = parse_grid(args.re_grid)
    eq = cfg.equilibrium

    def one(x):
        val = df.eval_k(eq, complex(x, args.im))
        return [x, args.im, val.k.real, val.k.imag, val.region.value, val.method.value]

    write_rows(cfg, ["re_z", "im_z", "re_k", "im_k", "region", "method"], _pmap(cfg, one, xs))
    return EXIT_OK


def cmd_validate(cfg, args):
    only = [s for s in args.only.split(",") if s] if args.only else None
    rep = run_validation(cfg.equilibrium, cfg.tolerances, only)
    for note in rep.notes:
        sys.stderr.write(f"ignored: {note}\n")
    if cfg.format == "json":
        write_json(cfg, {"equilibrium": rep.equilibrium, "passed": rep.passed,
                         "suites": [vars(r) for r in rep.results]})
    else:
        _emit(cfg, "\n".join(rep.lines()) + "\n")
    return EXIT_OK if rep.passed else EXIT_ORACLE


# -- parser ---------------------------------------------------------------------------------
class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--equilibrium", help="equilibrium JSON file (default: Maxwellian)")
    common.add_argument("--output", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="loosen a built-in tolerance (tighter values are ignored)")

    p = _Parser(prog="vlasov-linear", description="Linearized Vlasov-Poisson toolkit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("penrose", parents=[common], help="winding numbers of k(R) about positive probes")
    s.add_argument("--probes", default="0.1,0.5,1,2,5")
    s.set_defaults(func=cmd_penrose)

    s = sub.add_parser("dispersion", parents=[common], help="low-frequency zeros omega(r)")
    s.add_argument("--r-grid", required=True)
    s.set_defaults(func=cmd_dispersion)

    s = sub.add_parser("poles", parents=[common], help="poles of the generalized Poisson kernels")
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--xi-grid", required=True)
    s.add_argument("--r0", type=float, default=0.05, help="upper |xi| for j >= 4")
    s.set_defaults(func=cmd_poles)

    s = sub.add_parser("greens", parents=[common], help="smooth part of the Green's function")
    s.add_argument("--xi", type=float, required=True)
    s.add_argument("--tau-grid", required=True)
    s.add_argument("--method", choices=("closed", "low", "high", "auto"), default="auto")
    s.add_argument("--r0", type=float, default=gf.R0_DEFAULT)
    s.set_defaults(func=cmd_greens)

    s = sub.add_parser("volterra", parents=[common], help="solve the per-mode Volterra equation")
    s.add_argument("--xi", type=float, required=True)
    s.add_argument("--forcing", help="forcing JSON (default: Gaussian free streaming)")
    s.add_argument("--t-max", type=float, default=40.0)
    s.add_argument("--steps", type=int, default=2048)
    s.add_argument("--richardson", action="store_true")
    s.set_defaults(func=cmd_volterra)

    s = sub.add_parser("forcing-decay", parents=[common], help="sup-norm decay of free streaming")
    s.add_argument("--forcing")
    s.add_argument("--t-grid", default="4:64:5")
    s.set_defaults(func=cmd_forcing_decay)

    s = sub.add_parser("kpath", parents=[common], help="k along a horizontal path")
    s.add_argument("--re-grid", required=True)
    s.add_argument("--im", type=float, default=0.0)
    s.set_defaults(func=cmd_kpath)

    s = sub.add_parser("validate", parents=[common], help="run the oracle suite")
    s.add_argument("--only", help="comma-separated suite names")
    s.set_defaults(func=cmd_validate)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        eq = from_json(args.equilibrium) if args.equilibrium else maxwellian()
        cfg = RunConfig(eq, Path(args.output) if args.output else None, args.format, args.threads,
                        _parse_tolerances(args.tol))
        return args.func(cfg, args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        # bad files, malformed JSON and out-of-domain inputs
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except OracleFailure as exc:
        sys.stderr.write(f"oracle failure: {type(exc).__name__}: {exc}\n")
        return EXIT_ORACLE
    except VlasovError as exc:
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return EXIT_ORACLE


def main() -> None:
    sys.exit(run())
