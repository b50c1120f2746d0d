"""Command-line surface: compute, sweep, figure, limits.

Exit codes: 0 success, 1 malformed configuration/arguments,
2 quadrature non-convergence, 3 regime rejection, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .compute import harvest
from .limits import GammaFamily, mass_limit_check, run_gamma_family
from .quadrature import NonConvergenceError, QuadratureSpec
from .recipes import RECIPE_IDS, run_figure
from .scenario import (
    Delocalized,
    RegimeRejectedError,
    ScenarioConfig,
    config_from_mapping,
    regime_check,
)
from .sweep import format_number, run_sweep, write_csv

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NONCONVERGENCE = 2
EXIT_REGIME = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udw-harvest",
        description="Excitation, entangling term and negativity for "
        "Unruh-DeWitt detector pairs",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scenario_flags(p):
        p.add_argument("--config", help="key=value scenario file")
        p.add_argument("--omega", type=float)
        p.add_argument("--separation", type=float)
        p.add_argument("--model", choices=["pointlike", "smeared", "delocalized"])
        p.add_argument("--width", type=float)
        p.add_argument("--mass", type=float)
        p.add_argument("--speed-ratio", dest="speed_ratio", type=float)
        p.add_argument("--path", choices=["exact", "taylor"])
        p.add_argument("--rel-tol", dest="rel_tol", type=float)
        p.add_argument("--abs-tol", dest="abs_tol", type=float)

    p = sub.add_parser("compute", help="single-point result as JSON")
    add_scenario_flags(p)

    p = sub.add_parser("sweep", help="grid sweep to CSV")
    add_scenario_flags(p)
    p.add_argument(
        "--axis",
        action="append",
        required=True,
        metavar="NAME=LO:HI:N[:log] | NAME=v1,v2,...",
        help="sweep axis (repeat for a 2D grid)",
    )
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=os.cpu_count())

    p = sub.add_parser("figure", help="figure-data reproduction")
    p.add_argument("--recipe", required=True, help=", ".join(RECIPE_IDS))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=os.cpu_count())

    p = sub.add_parser("limits", help="limit reports (JSON + optional CSV)")
    p.add_argument("--kind", choices=["gamma", "mass"], required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--separation", type=float, required=True)
    p.add_argument("--path", choices=["exact", "taylor"], default="taylor")
    p.add_argument("--lmc", type=float, help="width*mass product (gamma kind)")
    p.add_argument("--gammas", help="descending comma list (gamma kind)")
    p.add_argument("--l-base", dest="l_base", type=float, default=10.0 / 9.0)
    p.add_argument("--width", type=float, help="fixed width (mass kind)")
    p.add_argument("--masses", help="ascending comma list (mass kind)")
    p.add_argument("--out", help="optional CSV path")
    return parser


def _scenario_from_args(args) -> ScenarioConfig:
    kv: dict[str, str] = {}
    if args.config:
        from .scenario import CONFIG_KEYS

        if not os.path.exists(args.config):
            raise ValueError(f"config file not found: {args.config}")
        with open(args.config, encoding="utf-8") as fh:
            for ln, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"{args.config}:{ln}: expected key=value")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in CONFIG_KEYS:
                    raise ValueError(f"{args.config}:{ln}: unknown key {key!r}")
                kv[key] = value.strip()
    for key in ("omega", "separation", "model", "width", "mass", "speed_ratio", "path"):
        val = getattr(args, key, None)
        if val is not None:
            kv[key] = str(val)
    return config_from_mapping(kv)


def _spec_from_args(args) -> QuadratureSpec | None:
    if args.rel_tol is None and args.abs_tol is None:
        return None
    from .classical import DEFAULT_SPEC

    return DEFAULT_SPEC.with_(
        **{
            k: v
            for k, v in (("rel_tol", args.rel_tol), ("abs_tol", args.abs_tol))
            if v is not None
        }
    )


def _parse_axis(text: str):
    if "=" not in text:
        raise ValueError(f"axis spec {text!r} must be NAME=...")
    name, _, rhs = text.partition("=")
    name = name.strip()
    if "," in rhs:
        values = [float(v) for v in rhs.split(",") if v.strip()]
    else:
        parts = rhs.split(":")
        if len(parts) not in (3, 4):
            raise ValueError(f"axis spec {text!r}: expected LO:HI:N[:log]")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if len(parts) == 4:
            if parts[3] != "log":
                raise ValueError(f"axis spec {text!r}: unknown modifier {parts[3]!r}")
            values = list(np.geomspace(lo, hi, n))
        else:
            values = list(np.linspace(lo, hi, n))
    return name, values


def _cmd_compute(args) -> int:
    cfg = _scenario_from_args(args)
    spec = _spec_from_args(args)
    if isinstance(cfg.model, Delocalized):
        verdict = regime_check(cfg.model)
        regime = {"status": verdict.status, "message": verdict.message}
    else:
        regime = {"status": "ok", "message": "classical center of mass (regime-free)"}
    res = harvest(cfg, path=getattr(args, "path", None), spec=spec)
    out = {
        "p_a": res.p_a,
        "p_b": res.p_b,
        "re_m": res.m.real,
        "im_m": res.m.imag,
        "abs_m": abs(res.m),
        "negativity": res.negativity,
        "err_p": res.err_p,
        "err_m": res.err_m,
        "regime": regime,
    }
    print(json.dumps(out))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    axes = [_parse_axis(a) for a in args.axis]
    fixed: dict = {}
    if args.config:
        cfg = _scenario_from_args(args)
        from .scenario import config_to_text

        for line in config_to_text(cfg).splitlines():
            k, _, v = line.partition("=")
            fixed[k] = v if k in ("model", "path") else float(v)
    for key in ("omega", "separation", "model", "width", "mass", "speed_ratio", "path"):
        val = getattr(args, key, None)
        if val is not None:
            fixed[key] = val
    axis_names = {name for name, _ in axes}
    fixed = {k: v for k, v in fixed.items() if k not in axis_names}
    grid = run_sweep(
        axes, fixed, path=fixed.get("path"), spec=_spec_from_args(args), jobs=args.jobs
    )
    bad = write_csv(grid, args.out)
    if bad:
        print(f"warning: {bad} non-converged cell(s)", file=sys.stderr)
    return EXIT_OK


def _cmd_figure(args) -> int:
    sidecar = run_figure(args.recipe, args.out, jobs=args.jobs)
    failed = [a["name"] for a in sidecar["assertions"] if not a["passed"]]
    print(
        json.dumps(
            {"recipe": args.recipe, "files": sidecar["files"], "failed_assertions": failed}
        )
    )
    return EXIT_OK


def _csv_list(text, kind=float):
    return tuple(kind(v) for v in text.split(",") if v.strip())


def _cmd_limits(args) -> int:
    if args.kind == "gamma":
        if args.lmc is None or args.gammas is None:
            raise ValueError("gamma kind requires --lmc and --gammas")
        fam = GammaFamily(
            lmc=args.lmc, gammas=_csv_list(args.gammas), l_base=args.l_base
        )
        report = run_gamma_family(args.omega, args.separation, fam, path=args.path)
        param_name = "gamma"
    else:
        if args.width is None or args.masses is None:
            raise ValueError("mass kind requires --width and --masses")
        report = mass_limit_check(
            args.omega, args.separation, args.width, _csv_list(args.masses),
            path=args.path,
        )
        param_name = "mass"
    out = {
        "kind": args.kind,
        "rows": [
            {param_name: r[0], "p": r[1], "abs_m": r[2], "negativity": r[3]}
            for r in report.values
        ],
        "reference": {
            "p": report.reference[0],
            "abs_m": report.reference[1],
            "negativity": report.reference[2],
        },
        "errors": report.errors,
        "rates": report.rates,
        "monotone": {
            "p": report.monotone_error_decrease("P"),
            "abs_m": report.monotone_error_decrease("abs_M"),
        },
    }
    print(json.dumps(out))
    if args.out:
        lines = [f"{param_name},p,abs_m,negativity"]
        for r in report.values:
            lines.append(",".join(format_number(v) for v in r))
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        if args.command == "compute":
            return _cmd_compute(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "figure":
            return _cmd_figure(args)
        if args.command == "limits":
            return _cmd_limits(args)
        raise ValueError(f"unknown command {args.command!r}")
    except RegimeRejectedError as exc:
        print(f"error: regime rejected: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except NonConvergenceError as exc:
        print(f"error: quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (OSError, IOError) as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
