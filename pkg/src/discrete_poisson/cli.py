"""Command line interface.

Exit codes: 0 success, 1 invalid configuration, 2 tessellation generation
failure, 3 solver failure, 4 I/O failure, 5 verification mismatch.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import io as tio
from .geometry import DomainBox, chi_statistics, extract_contacts, generate
from .homogenize import SWEEP_COLUMNS, HomogenizationError, alpha_sweep, simulate
from .plotting import PALETTE, Panel, Series, csv_text, emit_svg
from .solver import SolverError
from .theory import (
    MaterialParams,
    Mode,
    OrientationDistribution,
    closed_expectations,
    expectation_oracle,
    nu_interval,
    predict_cone,
    predict_general,
)

log = logging.getLogger("discrete_poisson")

EXIT_OK, EXIT_CONFIG, EXIT_GENERATION, EXIT_SOLVER, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3, 4, 5
MODE_LABELS = {Mode.PLANE_STRESS: "plane stress", Mode.PLANE_STRAIN: "plane strain", Mode.THREE_D: "3D"}


class ConfigError(Exception):
    pass


class GenerationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


# -- argument helpers ----------------------------------------------------------

def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _grid(text: str) -> np.ndarray:
    parts = str(text).split(":")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except (IndexError, ValueError):
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}") from None
    if len(parts) != 3 or n < 1:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
    return np.linspace(a, b, n)


def _add_global(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=d(0), help="random seed (integer, default 0)")
    g.add_argument("--threads", type=int, default=d(1), help="worker threads (count, default 1)")
    g.add_argument("--quiet", action="store_true", default=d(False), help="only report warnings and errors")
    g.add_argument("--config", default=d(None), metavar="FILE",
                   help="JSON file with option values keyed by option name (command line wins)")
    g.add_argument("--no-overwrite", action="store_true", default=d(False),
                   help="refuse to replace existing output files")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="discrete-poisson",
                     description="Poisson's ratio of discrete rigid-body-spring models: tessellations, "
                                 "analytic predictors and numerical homogenization.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_global(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        _add_global(p, suppress=True)
        return p

    p = cmd("generate", "generate a tessellation and write it as JSON")
    p.add_argument("--kind", choices=["voronoi", "rand-voronoi", "random", "centered"],
                   help="tessellation kind")
    p.add_argument("--size", nargs=2, type=float, metavar=("W", "H"),
                   help="domain width and height (length, same unit as --lmin)")
    p.add_argument("--lmin", type=float, default=1.0, help="minimal node distance (length, default 1)")
    p.add_argument("--max-trials", type=int, default=10_000,
                   help="consecutive rejected placements ending point placement (count, default 10000)")
    p.add_argument("--out", metavar="FILE", help="output tessellation JSON")

    p = cmd("stats", "contact-angle statistics of a tessellation")
    p.add_argument("--in", dest="input", metavar="FILE", help="tessellation JSON")
    p.add_argument("--bins", type=int, default=80, help="histogram bins over [-pi, pi] (count, default 80)")
    p.add_argument("--csv", metavar="FILE", help="write the chi histogram (radians, 1/radian) as CSV")
    p.add_argument("--svg", metavar="FILE", help="plot the chi histogram as SVG")

    p = cmd("predict", "analytic Poisson's ratio and modulus")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="ps",
                   help="ps = plane stress, pe = plane strain, 3d = three-dimensional (default ps)")
    p.add_argument("--alpha", type=_float_list, help="tangential/normal stiffness ratio (dimensionless, "
                                                      "comma-separated list allowed)")
    p.add_argument("--gamma", type=float, help="cone half-angle limiting |chi| (radians)")
    p.add_argument("--i1", type=float, help="E[cos chi] of an arbitrary distribution (dimensionless)")
    p.add_argument("--i2", type=float, help="E[cos 2chi] of an arbitrary distribution (dimensionless)")
    p.add_argument("--e0", type=float, default=1.0, help="normal contact stiffness E0 (stress, default 1)")
    p.add_argument("--table", metavar="FILE", help="also write the results as CSV")

    p = cmd("curves", "analytic curves of the cone and arbitrary-distribution predictors")
    p.add_argument("--figure", type=int, choices=[2, 3, 4],
                   help="2: nu and E/E0 against alpha for cone limits; 3: nu against gamma; "
                        "4: nu against alpha for given I2")
    p.add_argument("--gammas", type=_float_list, default=[0.0, 1.0, 2.0],
                   help="cone half-angles for figure 2 (radians, default 0,1,2)")
    p.add_argument("--alphas", type=_float_list, default=[0.0, 0.25, 0.5, 2.0, 3.0],
                   help="stiffness ratios for figure 3 (dimensionless, default 0,0.25,0.5,2,3)")
    p.add_argument("--i2-values", type=_float_list, default=[-1.0, -0.5, 0.0, 0.5, 1.0],
                   help="I2 values for figure 4 (dimensionless, default -1,-0.5,0,0.5,1)")
    p.add_argument("--points", type=int, default=121, help="samples per curve (count, default 121)")
    p.add_argument("--svg", metavar="FILE", help="output SVG")
    p.add_argument("--csv", metavar="FILE", help="output CSV (figure, panel, series, x, y)")

    p = cmd("simulate", "solve a tessellation under a prescribed boundary strain")
    p.add_argument("--in", dest="input", metavar="FILE", help="tessellation JSON")
    p.add_argument("--e0", type=float, default=1.0, help="normal contact stiffness E0 (stress, default 1)")
    p.add_argument("--alpha", type=float, default=1.0, help="tangential/normal stiffness ratio (default 1)")
    p.add_argument("--p", type=float, default=1e-3, help="imposed strain eps_11 (dimensionless, default 1e-3)")
    p.add_argument("--q", type=float, default=0.0, help="imposed strain eps_22 (dimensionless, default 0)")
    p.add_argument("--plane-strain", action="store_true", help="extract constants for plane strain")
    p.add_argument("--margin", type=float, help="stress window margin (length, default 3 l_min)")
    p.add_argument("--method", choices=["cholesky", "cg"], default="cholesky", help="linear solver")
    p.add_argument("--states", action="store_true", help="include per-contact states in the output")
    p.add_argument("--out", metavar="FILE", help="output result JSON")

    p = cmd("sweep", "numerical and predicted constants over a range of alpha")
    p.add_argument("--in", dest="input", nargs="+", metavar="FILE", help="one or more tessellation JSON files")
    p.add_argument("--alphas", type=_float_list, default=[0.1, 0.25, 0.5, 1.0, 2.0, 3.0],
                   help="stiffness ratios (dimensionless, comma-separated)")
    p.add_argument("--e0", type=float, default=1.0, help="normal contact stiffness E0 (stress, default 1)")
    p.add_argument("--mode", choices=["ps", "pe"], default="ps", help="plane stress or plane strain")
    p.add_argument("--p", type=float, default=1e-3, help="imposed strain eps_11 (dimensionless, default 1e-3)")
    p.add_argument("--q", type=float, default=0.0, help="imposed strain eps_22 (dimensionless, default 0)")
    p.add_argument("--margin", type=float, help="stress window margin (length, default 3 l_min)")
    p.add_argument("--csv", metavar="FILE", help="output CSV")
    p.add_argument("--svg", metavar="FILE", help="output SVG")

    p = cmd("verify-expectations", "compare closed-form expectations with Monte-Carlo integration")
    p.add_argument("--dim", type=int, choices=[2, 3], default=2, help="spatial dimension")
    p.add_argument("--gamma-grid", type=_grid, default=_grid("0.1:3.0:30"),
                   help="cone half-angles as start:stop:count (radians, default 0.1:3.0:30)")
    p.add_argument("--samples", type=int, default=1_000_000, help="Monte-Carlo samples per angle (count)")
    p.add_argument("--z-max", type=float, default=3.0,
                   help="allowed deviation in standard errors (dimensionless, default 3)")
    p.add_argument("--mvol-tol", type=float, default=5e-3,
                   help="allowed absolute deviation of E[rho:nu] (dimensionless, default 5e-3)")
    p.add_argument("--csv", metavar="FILE", help="output CSV")
    return parser


# -- config handling -------------------------------------------------------------

_CONFIG_SKIP = {"help", "command", "config", "version"}


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise ConfigError(f"unknown command {name}")


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise ConfigError("no command given (see --help)")
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        sp = _subparser(parser, args.command)
        known = {a.dest: a for a in sp._actions if a.dest not in _CONFIG_SKIP}
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        cfg = {("input" if k == "in" else k): v for k, v in cfg.items()}
        unknown = sorted(set(cfg) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        converted = {}
        for k, v in cfg.items():
            action = known[k]
            if action.type is not None and not isinstance(v, list):
                try:
                    v = action.type(v if action.type not in (_float_list, _grid) else str(v))
                except (argparse.ArgumentTypeError, ValueError, TypeError) as exc:
                    raise ConfigError(f"config key {k!r}: {exc}") from exc
            if action.choices is not None and v not in action.choices:
                raise ConfigError(f"config key {k!r}: {v!r} not in {list(action.choices)}")
            converted[k] = v
        sp.set_defaults(**converted)
        # global options live on both levels
        parser.set_defaults(**{k: v for k, v in converted.items()
                               if k in ("seed", "threads", "quiet", "no_overwrite")})
        args = parser.parse_args(argv)
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + ("in" if n == "input" else n.replace("_", "-")) for n in missing)
        raise ConfigError(f"{args.command}: missing required option(s) {flags}")


def _check_outputs(args, *paths) -> None:
    for path in paths:
        if path is None:
            continue
        p = Path(path)
        parent = p.parent if str(p.parent) else Path(".")
        if not parent.is_dir():
            raise OSError(f"output directory {parent} does not exist")
        if not os.access(parent, os.W_OK):
            raise OSError(f"output directory {parent} is not writable")
        if p.exists() and args.no_overwrite:
            raise OSError(f"{p} exists and --no-overwrite is set")


def _check_inputs(*paths) -> None:
    for path in paths:
        if not Path(path).is_file():
            raise OSError(f"input file {path} not found")


def _read(path):
    try:
        return tio.read_tessellation(path)
    except tio.FormatError as exc:
        raise OSError(str(exc)) from exc


# -- subcommands -------------------------------------------------------------------

def cmd_generate(args) -> int:
    _require(args, "kind", "size", "out")
    _check_outputs(args, args.out)
    w, h = args.size
    if not (w > 0 and h > 0 and args.lmin > 0):
        raise ConfigError("--size and --lmin must be positive")
    if args.max_trials < 1:
        raise ConfigError("--max-trials must be >= 1")
    try:
        t = generate(args.kind, DomainBox.from_size(w, h), args.lmin, args.seed, args.max_trials)
        contacts = extract_contacts(t)
    except ValueError as exc:
        raise GenerationError(str(exc)) from exc
    tio.write_tessellation(args.out, t, contacts)
    log.info("wrote %s: %d bodies, %d contacts", args.out, t.n_nodes, len(contacts))
    return EXIT_OK


def _contacts(path):
    t, contacts = _read(path)
    if contacts is None:
        try:
            contacts = extract_contacts(t)
        except ValueError as exc:
            raise OSError(f"{path}: inconsistent tessellation ({exc})") from exc
    return t, contacts


def cmd_stats(args) -> int:
    _require(args, "input")
    _check_inputs(args.input)
    _check_outputs(args, args.csv, args.svg)
    if args.bins < 1:
        raise ConfigError("--bins must be >= 1")
    t, contacts = _contacts(args.input)
    st = chi_statistics(contacts, bins=args.bins)
    area = t.domain.area
    closure = (contacts.volumes.sum() + contacts.boundary_volumes(t.nodes).sum()) / area - 1.0
    print(f"kind={t.kind.value} bodies={t.n_nodes} contacts={len(contacts)}")
    print(f"I1={st.I1:.6f} I2={st.I2:.6f}")
    print(f"body_area_closure={t.body_areas().sum() / area - 1.0:.3e} volume_closure={closure:.3e}")
    if args.csv:
        tio.atomic_write(args.csv, csv_text(["chi", "density"], zip(st.centers.tolist(), st.density.tolist())))
    if args.svg:
        emit_svg([Panel(f"contact angle ({t.kind.value})", "chi [rad]", "density [1/rad]",
                        [Series(f"I1={st.I1:.4f}, I2={st.I2:.4f}", st.centers, st.density)])], args.svg)
    return EXIT_OK


def cmd_predict(args) -> int:
    _require(args, "alpha")
    mode = Mode(args.mode)
    if args.gamma is not None and (args.i1 is not None or args.i2 is not None):
        raise ConfigError("give either --gamma or --i1/--i2, not both")
    if args.gamma is None and args.i2 is None:
        raise ConfigError("give --gamma or --i2 (with optional --i1)")
    _check_outputs(args, args.table)
    rows = []
    for alpha in args.alpha:
        try:
            if args.gamma is not None:
                ec = predict_cone(alpha, args.gamma, mode, args.e0)
                interval = nu_interval(mode, gamma=args.gamma)
            else:
                i1 = 1.0 if args.i1 is None else args.i1
                ec = predict_general(alpha, i1, args.i2, mode, args.e0)
                interval = nu_interval(mode, i2=args.i2)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(str(exc)) from exc
        where = f"gamma={args.gamma:g}" if args.gamma is not None else f"I1={args.i1 if args.i1 is not None else 1.0:g} I2={args.i2:g}"
        print(f"mode={mode.value} alpha={alpha:g} {where} nu={ec.nu:.6f} E/E0={ec.E / args.e0:.6f}")
        rows.append([mode.value, alpha, args.gamma if args.gamma is not None else "",
                     "" if args.gamma is not None else (1.0 if args.i1 is None else args.i1),
                     "" if args.gamma is not None else args.i2, ec.nu, ec.E / args.e0, *interval])
    lo, hi = rows[-1][-2:]
    print(f"nu range over alpha in [0, inf): [{lo:.6f}, {hi:.6f}]")
    if args.table:
        tio.atomic_write(args.table, csv_text(["mode", "alpha", "gamma", "I1", "I2", "nu", "E_over_E0",
                                               "nu_min", "nu_max"], rows))
    return EXIT_OK


def _safe(fn, *a):
    try:
        return fn(*a)
    except (ValueError, ZeroDivisionError):
        return None


def figure_panels(figure: int, gammas, alphas, i2_values, points: int = 121) -> list[Panel]:
    """Panels of the analytic curves for figures 2, 3 and 4."""
    modes = list(Mode)
    if figure == 2:
        a = np.linspace(0.0, 3.0, points)
        nu_s, e_s = [], []
        for gamma in gammas:
            for mode in modes:
                res = [_safe(predict_cone, x, gamma, mode) for x in a]
                label = f"{MODE_LABELS[mode]}, gamma={gamma:g}"
                nu_s.append(Series(label, a, [r.nu if r else math.nan for r in res]))
                e_s.append(Series(label, a, [r.E if r else math.nan for r in res]))
        return [Panel("Poisson's ratio", "alpha", "nu", nu_s), Panel("elastic modulus", "alpha", "E/E0", e_s)]
    if figure == 3:
        g = np.linspace(0.0, math.pi, points)
        panels = []
        for mode in modes:
            series = []
            for alpha in alphas:
                res = [_safe(predict_cone, alpha, x, mode) for x in g]
                series.append(Series(f"alpha={alpha:g}", g, [r.nu if r else math.nan for r in res]))
            panels.append(Panel(MODE_LABELS[mode], "gamma [rad]", "nu", series))
        return panels
    if figure == 4:
        a = np.linspace(0.0, 3.0, points)
        panels = []
        for mode in modes:
            series = []
            for i2 in i2_values:
                res = [_safe(predict_general, x, 1.0, i2, mode) for x in a]
                series.append(Series(f"I2={i2:g}", a, [r.nu if r else math.nan for r in res]))
            panels.append(Panel(MODE_LABELS[mode], "alpha", "nu", series))
        return panels
    raise ConfigError(f"unknown figure {figure}")


def cmd_curves(args) -> int:
    _require(args, "figure")
    if args.svg is None and args.csv is None:
        raise ConfigError("curves: give --svg and/or --csv")
    if args.points < 2:
        raise ConfigError("--points must be >= 2")
    _check_outputs(args, args.svg, args.csv)
    panels = figure_panels(args.figure, args.gammas, args.alphas, args.i2_values, args.points)
    if args.csv:
        rows = [[args.figure, p.title, s.label, x, y] for p in panels for s in p.series
                for x, y in zip(s.x.tolist(), s.y.tolist())]
        tio.atomic_write(args.csv, csv_text(["figure", "panel", "series", "x", "y"], rows))
    if args.svg:
        emit_svg(panels, args.svg)
    return EXIT_OK


def cmd_simulate(args) -> int:
    _require(args, "input", "out")
    _check_inputs(args.input)
    _check_outputs(args, args.out)
    try:
        params = MaterialParams(args.e0, args.alpha)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    mode = Mode.PLANE_STRAIN if args.plane_strain else Mode.PLANE_STRESS
    t, contacts = _contacts(args.input)
    res = simulate(t, params, args.p, args.q, mode, contacts, args.margin, args.method)
    st = chi_statistics(contacts)
    try:
        pred = predict_general(args.alpha, st.I1, st.I2, mode, args.e0)
        predicted = {"E": pred.E, "nu": pred.nu}
    except ValueError:
        predicted = None
    out = {
        "version": tio.FORMAT_VERSION,
        "input": {"file": os.path.basename(args.input), "kind": t.kind.value, "seed": t.seed,
                  "nodes": t.n_nodes, "contacts": len(contacts)},
        "params": {"E0": args.e0, "alpha": args.alpha, "p": args.p, "q": args.q, "mode": mode.value,
                   "method": args.method},
        "residuals": {"force": res.residual_force, "moment": res.residual_moment},
        "macro": {"sigma": res.macro.sigma, "eps": res.macro.eps, "margin": res.macro.margin,
                  "v_inner": res.macro.v_inner, "inner_contacts": res.macro.n_inner,
                  "E": res.constants.E, "nu": res.constants.nu,
                  "I1": st.I1, "I2": st.I2, "predicted": predicted},
        "dofs": res.dofs.reshape(-1, 3),
    }
    if args.states:
        s = res.states
        out["contact_states"] = [{"a": int(contacts.a[i]), "b": int(contacts.b[i]), "delta": s.delta[i],
                                  "e_N": s.e_N[i], "e_T": s.e_T[i], "s_N": s.s_N[i], "s_T": s.s_T[i],
                                  "f": s.f[i]} for i in range(len(contacts))]
    tio.atomic_write(args.out, tio.dumps(out))
    print(f"nu={res.constants.nu:.6f} E/E0={res.constants.E / args.e0:.6f} "
          f"residual_force={res.residual_force:.3e} residual_moment={res.residual_moment:.3e}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    _require(args, "input")
    if args.csv is None and args.svg is None:
        raise ConfigError("sweep: give --csv and/or --svg")
    _check_inputs(*args.input)
    _check_outputs(args, args.csv, args.svg)
    loaded = [_contacts(path) for path in args.input]
    all_rows = []
    for t, contacts in loaded:
        rows = alpha_sweep(t, args.alphas, args.e0, args.mode, args.p, args.q, contacts, args.margin,
                           threads=args.threads)
        failed = [r for r in rows if r.error]
        if len(failed) == len(rows):
            raise SolverError(f"every alpha failed for {t.kind.value}: {failed[0].error}")
        for r in rows:
            log.info("%s alpha=%g nu=%.5f (pred %.5f) E=%.5f (pred %.5f)", r.kind, r.alpha, r.nu_num,
                     r.nu_pred, r.E_num, r.E_pred)
        all_rows.append(rows)
    if args.csv:
        tio.atomic_write(args.csv, csv_text(SWEEP_COLUMNS, [r.as_csv_row() for rows in all_rows for r in rows]))
    if args.svg:
        nu_s, e_s = [], []
        for k, rows in enumerate(all_rows):
            color = PALETTE[k % len(PALETTE)]
            a = [r.alpha for r in rows]
            kind = rows[0].kind
            nu_s += [Series(f"{kind} numeric", a, [r.nu_num for r in rows], markers=True, color=color),
                     Series(f"{kind} predicted", a, [r.nu_pred for r in rows], dashed=True, color=color)]
            e_s += [Series(f"{kind} numeric", a, [r.E_num / args.e0 for r in rows], markers=True, color=color),
                    Series(f"{kind} predicted", a, [r.E_pred / args.e0 for r in rows], dashed=True, color=color)]
        emit_svg([Panel("Poisson's ratio", "alpha", "nu", nu_s),
                  Panel("elastic modulus", "alpha", "E/E0", e_s)], args.svg)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.samples < 2:
        raise ConfigError("--samples must be >= 2")
    grid = np.asarray(args.gamma_grid, dtype=float)
    if np.any(grid < 0) or np.any(grid > math.pi):
        raise ConfigError("gamma values must lie in [0, pi]")
    _check_outputs(args, args.csv)
    rows, failures = [], 0
    for k, gamma in enumerate(grid.tolist()):
        dist = OrientationDistribution.cone(gamma, args.dim)
        exact = closed_expectations(dist)
        est = expectation_oracle(dist, args.samples, seed=[args.seed, k], threads=args.threads)
        zn = _max_z(exact.n_sym, est.n_sym, est.n_sym_se)
        zt = _max_z(exact.t_sym, est.t_sym, est.t_sym_se)
        dm = abs(exact.m_vol - est.m_vol)
        ok = zn <= args.z_max and zt <= args.z_max and dm <= args.mvol_tol
        failures += not ok
        status = "PASS" if ok else "FAIL"
        print(f"dim={args.dim} gamma={gamma:.6f} m_vol={exact.m_vol:.6f} |dm|={dm:.2e} "
              f"max_z_N={zn:.2f} max_z_T={zt:.2f} {status}")
        rows.append([args.dim, gamma, exact.m_vol, est.m_vol, dm, zn, zt, status])
    if args.csv:
        tio.atomic_write(args.csv, csv_text(["dim", "gamma", "m_vol_closed", "m_vol_oracle", "m_vol_abs_diff",
                                             "max_z_N", "max_z_T", "status"], rows))
    print(f"{len(rows) - failures}/{len(rows)} rows PASS")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def _max_z(exact, est, se) -> float:
    diff = np.abs(np.asarray(exact) - np.asarray(est))
    se = np.asarray(se)
    tiny = se <= 1e-15
    z = np.where(tiny, np.where(diff <= 1e-12, 0.0, np.inf), diff / np.where(tiny, 1.0, se))
    return float(z.max())


COMMANDS = {"generate": cmd_generate, "stats": cmd_stats, "predict": cmd_predict, "curves": cmd_curves,
            "simulate": cmd_simulate, "sweep": cmd_sweep, "verify-expectations": cmd_verify}


def run(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GenerationError as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except (SolverError, HomogenizationError) as exc:
        print(f"solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
