"""Command-line entry point: ``laserentropy <subcommand> ...``.

Exit status: 0 success, 2 usage error, 3 invalid input, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from . import dynamics, fock, reports, units
from .errors import NumericalError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


class ValidationError(ValueError):
    pass


def _range(text: str) -> tuple[float, float, int]:
    try:
        a, b, k = text.split(":")
        return float(a), float(b), int(k)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:STOP:STEPS, got {text!r}") from None


def _add_output(p: argparse.ArgumentParser, formats=("csv", "json")) -> None:
    p.add_argument("--format", choices=formats, default=None, help=f"output format (default {formats[0]})")
    p.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    p.add_argument("--config", default=None, help="JSON file whose keys mirror the long flags")


def _add_laser_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, help="linear gain (1/time)")
    p.add_argument("--beta", type=float, help="saturation coefficient (1/time)")
    p.add_argument("--gamma", type=float, help="cavity loss nu/Q (1/time)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="laserentropy",
        description="Photon and condensate statistics, entropies and heat-engine budgets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("laser", help="laser photon statistics and entropy")
    _add_laser_flags(p)
    p.add_argument("--trunc-tol", type=float, default=None)
    p.add_argument("--kappa", type=float, default=None, help="photon throughput in k_B units per time")
    p.add_argument("--power", type=float, default=None, help="emitted power in W (with --laser-frequency)")
    p.add_argument("--laser-frequency", type=float, default=None, help="laser frequency in Hz")
    p.add_argument("--include-distributions", action="store_true", default=None)
    _add_output(p, ("csv", "json", "gnuplot"))

    p = sub.add_parser("bec", help="condensate ground-state statistics and entropy")
    p.add_argument("--n", type=int, dest="n_total", help="total atom number N")
    p.add_argument("--t", type=float, dest="t_reduced", help="reduced temperature T/T_c")
    p.add_argument("--sweep-t", type=_range, default=None, help="START:STOP:STEPS in T/T_c")
    p.add_argument("--exponent", type=float, default=None, help="condensate-fraction exponent (default 3)")
    p.add_argument("--kappa-wall", type=float, default=None)
    p.add_argument("--floor", type=float, default=None, help="smallest H for the closed form (default 1)")
    _add_output(p)

    p = sub.add_parser("engine", help="quantum heat engine entropy budget")
    p.add_argument("scenario", nargs="?", help="scenario JSON file")
    _add_output(p, ("json", "csv"))

    p = sub.add_parser("evolve", help="integrate the diagonal master equation")
    p.add_argument("--model", choices=("laser", "bec", "constant", "table"), default=None)
    _add_laser_flags(p)
    p.add_argument("--n", type=int, dest="n_total")
    p.add_argument("--t", type=float, dest="t_reduced")
    p.add_argument("--gain", type=float, help="constant model gain")
    p.add_argument("--loss", type=float, help="constant model loss")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--table", default=None, help="CSV with columns n,gain,loss")
    p.add_argument("--initial", default=None, help="vacuum | n:K | thermal:NBAR (default vacuum)")
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--samples", type=int, default=None, help="trajectory rows (default 50)")
    p.add_argument("--method", choices=("step", "power"), default=None)
    _add_output(p)

    p = sub.add_parser("table1", help="linewidth and entropy flux across threshold")
    p.add_argument("--n-h", type=float, help="thermal occupation below threshold")
    p.add_argument("--n-l", type=float, help="laser occupation above threshold")
    p.add_argument("--nu-over-q", type=float, help="cavity loss rate nu/Q")
    p.add_argument("--kappa", type=float, help="photon throughput")
    _add_output(p)

    p = sub.add_parser("sweep", help="parameter sweep producing one row per point")
    p.add_argument("--parameter", choices=reports.SWEEP_PARAMETERS, default=None)
    p.add_argument("--range", type=_range, dest="sweep_range", default=None, help="START:STOP:STEPS")
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--n", type=int, dest="n_total")
    p.add_argument("--exponent", type=float)
    p.add_argument("--pump-ratio", type=float, help="alpha/gamma for the laser column of occupation sweeps")
    p.add_argument("--trunc-tol", type=float)
    p.add_argument("--outputs", default=None, help="comma-separated columns to keep")
    p.add_argument("--jobs", type=int, default=None)
    _add_output(p)

    p = sub.add_parser("reproduce", help="regenerate every comparison into a directory")
    p.add_argument("--outdir", required=True)
    return parser


def _merge_config(args: argparse.Namespace, sub: argparse.ArgumentParser) -> None:
    path = getattr(args, "config", None)
    if not path:
        return
    try:
        cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    aliases = {"n": "n_total", "t": "t_reduced", "range": "sweep_range"}
    for key, value in cfg.items():
        dest = aliases.get(key, key.replace("-", "_"))
        if not hasattr(args, dest) or dest in ("config", "command"):
            sub.error(f"unknown config key {key!r}")
        if dest in ("sweep_range", "sweep_t") and isinstance(value, str):
            value = _range(value)
        if getattr(args, dest) is None:
            setattr(args, dest, value)


def _require(sub: argparse.ArgumentParser, args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + m.replace("_", "-") for m in missing)
        sub.error(f"missing required option(s): {flags}")


def _emit(text: str, args: argparse.Namespace) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _render(report: dict[str, Any], fmt: str, columns=None) -> str:
    if fmt == "json":
        return reports.to_json(report)
    return reports.rows_to_csv(report["rows"], columns)


# -- subcommands -----------------------------------------------------------


def cmd_laser(args, sub) -> int:
    _require(sub, args, "alpha", "beta", "gamma")
    p = fock.LaserParams(args.alpha, args.beta, args.gamma)
    tol = args.trunc_tol if args.trunc_tol is not None else fock.TRUNC_TOL
    kappa = args.kappa
    if kappa is None and args.power is not None:
        if args.laser_frequency is None:
            sub.error("--power needs --laser-frequency")
        kappa = units.photon_rate_from_power(args.power, args.laser_frequency)
    fmt = args.format or "csv"
    if fmt == "gnuplot":
        _emit(reports.laser_gnuplot(p, tol), args)
        return EXIT_OK
    report = reports.laser_report(p, tol, kappa, bool(args.include_distributions))
    for w in report["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    _emit(_render(report, fmt, reports.LASER_COLUMNS), args)
    return EXIT_OK


def cmd_bec(args, sub) -> int:
    _require(sub, args, "n_total")
    if args.t_reduced is None and args.sweep_t is None:
        sub.error("give --t or --sweep-t")
    exponent = args.exponent if args.exponent is not None else 3.0
    kappa = args.kappa_wall if args.kappa_wall is not None else 1.0
    floor = args.floor if args.floor is not None else 1.0
    if args.sweep_t is not None:
        ts = reports.sweep_values(*args.sweep_t)
    else:
        ts = [args.t_reduced]
    rows = [reports.bec_row(fock.BecParams(args.n_total, t, kappa, exponent), floor) for t in ts]
    params = {"n_total": args.n_total, "exponent": exponent, "kappa_wall": kappa, "floor": floor}
    report = reports.bec_report(rows, params)
    _emit(_render(report, args.format or "csv", reports.BEC_COLUMNS), args)
    return EXIT_OK


def cmd_engine(args, sub) -> int:
    if not args.scenario:
        sub.error("a scenario file is required")
    scenario, raw = reports.load_scenario(args.scenario)
    report = reports.engine_report(scenario, str(raw.get("name", Path(args.scenario).stem)))
    _emit(_render(report, args.format or "json", ("quantity", "value")), args)
    return EXIT_OK


def _evolve_model(args, sub) -> dynamics.LadderModel:
    if args.model == "laser":
        _require(sub, args, "alpha", "beta", "gamma")
        return dynamics.laser_model(fock.LaserParams(args.alpha, args.beta, args.gamma), args.n_max)
    if args.model == "bec":
        _require(sub, args, "n_total", "t_reduced")
        return dynamics.bec_model(fock.BecParams(args.n_total, args.t_reduced))
    if args.model == "constant":
        _require(sub, args, "gain", "loss", "n_max")
        return dynamics.constant_rate_model(args.gain, args.loss, args.n_max)
    _require(sub, args, "table")
    return reports.load_rate_table(args.table)


def cmd_evolve(args, sub) -> int:
    _require(sub, args, "model", "t_final")
    model = _evolve_model(args, sub)
    initial = reports.initial_state(args.initial or "vacuum", model.n_max)
    report = reports.evolve_report(
        model, initial, args.t_final, args.dt, args.samples or 50, args.method or "step"
    )
    fmt = args.format or "csv"
    if fmt == "csv":
        final = report["final"]
        print(
            "final total variation to steady state: " + repr(final["tv_to_steady_state"]),
            file=sys.stderr,
        )
    _emit(_render(report, fmt, reports.TRAJECTORY_COLUMNS), args)
    return EXIT_OK


def cmd_table1(args, sub) -> int:
    _require(sub, args, "n_h", "n_l", "nu_over_q", "kappa")
    report = reports.table1_report(args.n_h, args.n_l, args.nu_over_q, args.kappa)
    _emit(_render(report, args.format or "csv", reports.TABLE1_COLUMNS), args)
    return EXIT_OK


def cmd_sweep(args, sub) -> int:
    _require(sub, args, "parameter", "sweep_range")
    fixed: dict[str, Any] = {}
    if args.parameter == "pump_ratio":
        _require(sub, args, "beta")
        fixed = {"beta": args.beta, "gamma": args.gamma if args.gamma is not None else 1.0}
        if args.trunc_tol is not None:
            fixed["trunc_tol"] = args.trunc_tol
    elif args.parameter == "reduced_temperature":
        _require(sub, args, "n_total")
        fixed = {"n_total": args.n_total, "exponent": args.exponent if args.exponent is not None else 3.0}
    elif args.pump_ratio is not None:
        fixed = {"pump_ratio": args.pump_ratio}
    outputs = [o.strip() for o in args.outputs.split(",")] if args.outputs else None
    start, stop, steps = args.sweep_range
    report = reports.sweep_report(args.parameter, start, stop, steps, fixed, outputs, args.jobs or 1)
    _emit(_render(report, args.format or "csv"), args)
    return EXIT_OK


def cmd_reproduce(args, sub) -> int:
    from .reproduce import reproduce

    for path in reproduce(Path(args.outdir)):
        print(path)
    return EXIT_OK


COMMANDS = {
    "laser": cmd_laser,
    "bec": cmd_bec,
    "engine": cmd_engine,
    "evolve": cmd_evolve,
    "table1": cmd_table1,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
}


def bundled_scenario(name: str) -> Path:
    return Path(str(resources.files("laserentropy") / "data" / "scenarios" / f"{name}.json"))


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]  # type: ignore[union-attr]
    try:
        _merge_config(args, sub)
        return COMMANDS[args.command](args, sub)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
