"""Command-line front end.

Commands::

    electromeniscus droplet-table [--kappa K] [--rho-n N] [--u0-list ...]
    electromeniscus solve    --u0 VOLTS --gamma g0 [--out profile.csv] [--summary s.json]
    electromeniscus sweep    --u0-list 0,200,400 [--gamma g0,g1,g2,g3]
    electromeniscus limit    --gamma g1
    electromeniscus variational --u0-list 0,1000,2000 [--calibrate]

Exit codes: 0 success, 2 no convergence, 3 above the limit potential,
4 bad configuration.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path

from . import droplet, meniscus, variational
from .errors import BadBracket, ConfigError, DomainError, ElectroMeniscusError, NoSolution
from .numerics import ToleranceSpec
from .tolman import FLAGS_BY_LAW, LAWS_BY_FLAG, TensionLaw

EXIT_OK = 0
EXIT_NO_CONVERGENCE = 2
EXIT_ABOVE_LIMIT = 3
EXIT_BAD_CONFIG = 4

CONFIG_KEYS = {
    "gamma0_N_per_m": "gamma0",
    "rho_kg_per_m3": "rho_l",
    "H_m": "H",
    "d_m": "d",
    "R_m": "R",
    "R0_m": "R0",
    "epsilon_F_per_m": "epsilon",
    "g_m_per_s2": "g_accel",
}
ALL_FLAGS = ("g0", "g1", "g2", "g3")


class UsageError(Exception):
    """Bad command-line input; mapped to the bad-configuration exit code."""


def fmt(x) -> str:
    """Six significant digits; empty for a missing value."""
    if x is None:
        return ""
    x = float(x)
    if x == 0:
        return "0"
    return f"{x:.6g}"


def round6(x):
    return None if x is None else float(fmt(x))


# --------------------------------------------------------------------------- config

@dataclasses.dataclass
class RunConfig:
    preset: meniscus.MaterialPreset
    alpha: float = 1.0
    tol: ToleranceSpec | None = None


def load_config(preset_name: str, path: str | None, alpha: float | None = None,
                tol: float | None = None) -> RunConfig:
    """Resolve a preset plus optional ``key = value`` overrides from a file."""
    values: dict = {}
    if preset_name != "custom":
        if preset_name not in meniscus.PRESETS:
            raise ConfigError(f"unknown preset {preset_name!r}")
        values = dataclasses.asdict(meniscus.PRESETS[preset_name])
    file_alpha = None
    if path:
        parser = configparser.ConfigParser()
        parser.optionxform = str  # keys are case sensitive
        try:
            text = Path(path).read_text(encoding="utf-8")
            parser.read_string("[run]\n" + text)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for key, raw in parser["run"].items():
            try:
                number = float(raw)
            except ValueError as exc:
                raise ConfigError(f"{key}: not a number: {raw!r}") from exc
            if key == "alpha":
                file_alpha = number
            elif key in CONFIG_KEYS:
                values[CONFIG_KEYS[key]] = number
            else:
                raise ConfigError(f"unknown config key {key!r}")
    missing = [k for k, v in CONFIG_KEYS.items()
               if v not in values and v not in ("epsilon", "g_accel")]
    if missing:
        raise ConfigError("custom preset is missing " + ", ".join(missing))
    preset = meniscus.MaterialPreset(**values)
    a = alpha if alpha is not None else (file_alpha if file_alpha is not None else 1.0)
    if not a > 0:
        raise ConfigError("alpha must be positive")
    spec = None
    if tol is not None:
        if not tol > 0:
            raise ConfigError("--tol must be positive")
        spec = ToleranceSpec(abs_tol=tol, rel_tol=tol)
    return RunConfig(preset=preset, alpha=a, tol=spec)


def parse_list(text: str | None) -> list[float]:
    if text is None or not text.strip():
        return []
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def parse_kinds(text: str | None, default=ALL_FLAGS) -> list[TensionLaw]:
    items = default if text is None else [t for t in text.split(",") if t.strip()]
    try:
        return [TensionLaw.parse(t) for t in items]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# --------------------------------------------------------------------------- output

def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def table(header, rows, fmt_name: str) -> str:
    if fmt_name == "json":
        records = [dict(zip(header, (round6(v) for v in row))) for row in rows]
        return json_text(records)
    return csv_text(header, rows)


# --------------------------------------------------------------------------- commands

def cmd_droplet_table(args) -> int:
    if not args.kappa > 0:
        raise ConfigError("kappa must be positive")
    if not args.rho_n > 0:
        raise ConfigError("rho_n must be positive")
    U_list = list(droplet.TABLE_U) if args.u0_list is None else parse_list(args.u0_list)
    alpha = 1.0 if args.alpha is None else args.alpha
    rows = [(U, *(x[k] for k in droplet.TABLE_KINDS))
            for U, x in droplet.rmin_table(U_list, args.kappa, args.rho_n, alpha)]
    header = ["U_microvolts", "x_gamma0", "x_gamma1", "x_gamma2"]
    emit(table(header, rows, args.format), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = load_config(args.preset, args.config, args.alpha, args.tol)
    if args.u0 is None:
        raise UsageError("solve needs --u0")
    kind = parse_kinds(args.gamma, ("g0",))[0]
    problem = meniscus.derive_problem(cfg.preset, args.u0, kind, cfg.alpha)
    summary = {"U0_volts": round6(args.u0), "kind": kind.value, "z_m": None,
               "residual": None, "converged": False, "tolman_iterations": 0}
    try:
        profile, report = meniscus.solve(problem, tol=cfg.tol)
    except NoSolution as exc:
        summary["beyond_limit"] = True
        summary["message"] = str(exc)
        write_summary(summary, args)
        return EXIT_ABOVE_LIMIT
    except ElectroMeniscusError as exc:
        summary["message"] = str(exc)
        write_summary(summary, args)
        return EXIT_NO_CONVERGENCE
    try:
        profile.check_invariants()
        valid = True
    except AssertionError as exc:
        summary["message"] = f"profile invariant violated: {exc}"
        valid = False
    beyond = profile.z_m > 1.0
    summary.update(z_m=round6(profile.z_m), residual=round6(profile.residual),
                   converged=bool(report.converged and valid),
                   tolman_iterations=report.tolman_iterations, beyond_limit=beyond)
    header = ["r", "z", "dz_dr", "sigma_hat", "gamma_hat"]
    emit(table(header, list(profile.rows()), args.format), args.out)
    write_summary(summary, args)
    if not summary["converged"]:
        return EXIT_NO_CONVERGENCE
    return EXIT_ABOVE_LIMIT if beyond else EXIT_OK


def write_summary(summary, args) -> None:
    text = json_text(summary)
    if args.summary:
        emit(text, args.summary)
    elif args.out:
        sys.stdout.write(text)
    else:
        sys.stderr.write(text)


def cmd_sweep(args) -> int:
    cfg = load_config(args.preset, args.config, args.alpha, args.tol)
    U_list = parse_list(args.u0_list)
    kinds = parse_kinds(args.gamma)
    result = meniscus.sweep(cfg.preset, U_list, kinds, cfg.alpha, cfg.tol)
    header = ["U0_volts"] + [f"zm_gamma{flag[1]}" for flag in ALL_FLAGS]
    rows = []
    for U in U_list:
        rows.append([U] + [result.cells.get((U, LAWS_BY_FLAG[f])) for f in ALL_FLAGS])
    emit(table(header, rows, args.format), args.out)
    for (U, kind), msg in sorted(result.errors.items(), key=lambda kv: (kv[0][0], kv[0][1].value)):
        print(f"U0={fmt(U)} {FLAGS_BY_LAW[kind]}: {msg}", file=sys.stderr)
    for U, kind in sorted(result.beyond, key=lambda c: (c[0], c[1].value)):
        print(f"U0={fmt(U)} {FLAGS_BY_LAW[kind]}: tip above the pipet radius", file=sys.stderr)
    if U_list and not any(v is not None for v in result.cells.values()):
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_limit(args) -> int:
    cfg = load_config(args.preset, args.config, args.alpha, args.tol)
    kind = parse_kinds(args.gamma, ("g0",))[0]
    res = meniscus.limit_potential(cfg.preset, kind, U_hi=args.u_hi, alpha=cfg.alpha, tol=cfg.tol)
    out = {"kind": kind.value, "U_lim_volts": round6(res.U_lim), "z_m_at_limit": round6(res.z_m)}
    emit(json_text(out), args.out)
    return EXIT_OK


def cmd_variational(args) -> int:
    cfg = load_config(args.preset, args.config, args.alpha, args.tol)
    U_list = parse_list(args.u0_list) if args.u0_list is not None else [0.0]
    if args.calibrate:
        if len(U_list) < 2:
            raise UsageError("calibration needs at least two potentials")
        shot = meniscus.sweep(cfg.preset, U_list, [TensionLaw.CONSTANT], cfg.alpha, cfg.tol)
        curve = shot.column(TensionLaw.CONSTANT)
        if len(curve) < 2:
            print("shooting failed for too many potentials", file=sys.stderr)
            return EXIT_NO_CONVERGENCE
        cal = variational.calibrate_reff(curve, cfg.preset)
        out = {"reff_hat": round6(cal.reff_hat), "rms_error": round6(cal.rms_error),
               "degenerate": cal.degenerate,
               "curve": [[round6(U), round6(zv), round6(zs)] for U, zv, zs in cal.curve]}
    else:
        if not 0 < args.reff < 1:
            raise ConfigError("--reff must lie in (0, 1)")
        z_var = variational.variational_curve(cfg.preset, U_list, args.reff)
        out = {"reff_hat": round6(args.reff), "rms_error": None,
               "curve": [[round6(U), round6(z), None] for U, z in zip(U_list, z_var)]}
    emit(json_text(out), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="electromeniscus",
                                     description="Charged meniscus and droplet equilibria.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, material=True):
        if material:
            p.add_argument("--preset", default="large", choices=["large", "small", "custom"])
            p.add_argument("--config", help="key = value file overriding preset values")
            p.add_argument("--tol", type=float, help="integrator tolerance (abs and rel)")
        p.add_argument("--alpha", type=float, help="width of the increasing tanh law")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", default="csv", choices=["csv", "json"])

    p = sub.add_parser("droplet-table", help="equilibrium radii of a charged drop")
    common(p, material=False)
    p.add_argument("--kappa", type=float, default=droplet.KAPPA_TABLE)
    p.add_argument("--rho-n", dest="rho_n", type=float, default=droplet.RHO_N_TABLE)
    p.add_argument("--u0-list", help="drop potentials in microvolts, comma separated")
    p.set_defaults(func=cmd_droplet_table)

    p = sub.add_parser("solve", help="meniscus profile at one potential")
    common(p)
    p.add_argument("--u0", type=float)
    p.add_argument("--gamma", default="g0", choices=ALL_FLAGS)
    p.add_argument("--summary", help="summary JSON path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="tip heights over potentials and tension laws")
    common(p)
    p.add_argument("--u0-list", required=True)
    p.add_argument("--gamma", help="comma list of g0..g3 (default: all)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("limit", help="limit potential")
    common(p)
    p.add_argument("--gamma", default="g0", choices=ALL_FLAGS)
    p.add_argument("--u-hi", dest="u_hi", type=float, default=1e4)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("variational", help="parabolic-trial energy minimization")
    common(p)
    p.add_argument("--u0-list")
    p.add_argument("--calibrate", action="store_true")
    p.add_argument("--reff", type=float, default=0.31)
    p.set_defaults(func=cmd_variational)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, UsageError, BadBracket) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except NoSolution as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABOVE_LIMIT
    except ElectroMeniscusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
