"""Report builders behind the command-line subcommands.

Each builder returns a plain dict (JSON-ready) with a ``rows`` list that
the CLI can also flatten to CSV. Nothing here touches the filesystem
except :func:`load_scenario` and :func:`load_rate_table`.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import dynamics, engine, entropy, fock, units
from .errors import NumericalError

SCHEMA_VERSION = "1.0"

LASER_COLUMNS = (
    "form",
    "mean",
    "variance",
    "mode",
    "s_direct",
    "s_closed",
    "closed_method",
    "tv_to_exact",
    "norm_deficit",
    "flags",
)
BEC_COLUMNS = (
    "n_total",
    "t_reduced",
    "H",
    "mean_n0",
    "variance_n0",
    "s_g_closed",
    "s_g_closed_method",
    "s_g_direct",
    "s_bulk",
    "ratio_g_over_bulk",
    "norm_deficit",
    "flags",
)
TRAJECTORY_COLUMNS = ("t", "mean", "variance", "entropy")
TABLE1_COLUMNS = ("quantity", "below_threshold", "above_threshold", "ratio")


class ScenarioError(ValueError):
    """Malformed or inconsistent engine scenario file."""


def _header(command: str) -> dict[str, Any]:
    return {"schema_version": SCHEMA_VERSION, "command": command}


def _collect_warnings(fn: Callable[[], Any]) -> tuple[Any, list[str]]:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = fn()
    seen: list[str] = []
    for w in caught:
        msg = str(w.message)
        if msg not in seen:
            seen.append(msg)
    return result, seen


# -- laser -----------------------------------------------------------------


def laser_closed_entropy(p: fock.LaserParams) -> entropy.EntropyValue | None:
    """Closed form appropriate to the side of threshold, None exactly at it."""
    if p.alpha > p.gamma:
        return entropy.laser_entropy_closed_form(p)
    if p.alpha < p.gamma:
        return entropy.thermal_entropy_closed_form(p.below_threshold_n_bar())
    return None


def _dist_row(form: str, d: fock.FockDistribution, exact: fock.FockDistribution, closed) -> dict:
    m = fock.moments(d)
    return {
        "form": form,
        "mean": m.mean,
        "variance": m.variance,
        "mode": m.mode,
        "s_direct": entropy.von_neumann_entropy(d).value,
        "s_closed": None if closed is None else closed.value,
        "closed_method": None if closed is None else closed.method.value,
        "tv_to_exact": fock.total_variation(d, exact),
        "norm_deficit": d.norm_deficit,
        "flags": ";".join(d.flags),
    }


def laser_report(
    p: fock.LaserParams,
    trunc_tol: float = fock.TRUNC_TOL,
    kappa: float | None = None,
    include_distributions: bool = False,
) -> dict[str, Any]:
    def build():
        exact = fock.laser_exact_distribution(p, trunc_tol)
        closed = laser_closed_entropy(p)
        forms = {"exact": exact}
        if p.above_threshold:
            forms["shifted_poisson"] = fock.laser_shifted_poisson(p, trunc_tol)
            forms["gaussian"] = fock.laser_gaussian(p, trunc_tol)
        elif p.alpha < p.gamma:
            forms["thermal"] = fock.thermal_distribution(p.below_threshold_n_bar(), trunc_tol)
        rows = [_dist_row(name, d, exact, closed) for name, d in forms.items()]
        return exact, forms, rows

    (exact, forms, rows), caught = _collect_warnings(build)
    report = _header("laser")
    report["params"] = p.as_dict()
    regime = (
        "above_threshold" if p.alpha > p.gamma else "below_threshold" if p.alpha < p.gamma else "threshold"
    )
    report["derived"] = {
        "A": p.A,
        "B": p.B,
        "pump_ratio": p.pump_ratio,
        "excess": p.excess,
        "regime": regime,
        "log_normalization": exact.log_normalization,
        "tail_mass_bound": exact.tail_mass_bound,
    }
    report["rows"] = rows
    if regime == "threshold":
        report["linewidth"] = {"error": "linewidth formulas are singular at alpha == gamma"}
        n_occ = None
    else:
        lw = dynamics.linewidth(p)
        n_occ = p.n_bar if regime == "above_threshold" else p.below_threshold_n_bar()
        report["linewidth"] = {"regime": lw.regime.value, "fwhm": lw.fwhm, "n_bar": n_occ}
    if kappa is not None and n_occ is not None:
        flux = (
            entropy.entropy_flux_maser(n_occ, kappa)
            if regime == "above_threshold"
            else entropy.entropy_flux_thermal(n_occ, kappa)
        )
        report["entropy_flux"] = {"kappa": kappa, "value": flux.value}
    report["warnings"] = caught
    if include_distributions:
        report["distributions"] = {name: d.to_dict() for name, d in forms.items()}
    return report


def laser_gnuplot(p: fock.LaserParams, trunc_tol: float = fock.TRUNC_TOL) -> str:
    """Whitespace-separated columns n, exact, shifted-Poisson, Gaussian."""

    def build():
        cols = {"exact": fock.laser_exact_distribution(p, trunc_tol)}
        if p.above_threshold:
            cols["shifted_poisson"] = fock.laser_shifted_poisson(p, trunc_tol)
            cols["gaussian"] = fock.laser_gaussian(p, trunc_tol)
        return cols

    cols, _ = _collect_warnings(build)
    size = max(d.probs.size for d in cols.values())
    arrays = [d.padded(size) for d in cols.values()]
    lines = ["# n " + " ".join(cols)]
    for n in range(size):
        lines.append(" ".join([str(n)] + [repr(float(a[n])) for a in arrays]))
    return "\n".join(lines) + "\n"


# -- BEC -------------------------------------------------------------------


def bec_row(p: fock.BecParams, floor: float = entropy.BEC_CLOSED_FORM_FLOOR) -> dict[str, Any]:
    def build():
        d = fock.bec_ground_distribution(p)
        return d, entropy.bec_ground_entropy_closed_form(p, floor)

    (d, closed), caught = _collect_warnings(build)
    m = fock.moments(d)
    bulk = entropy.bulk_bose_gas_entropy(p.n_total, p.t_reduced).value
    flags = list(d.flags)
    if closed.flagged:
        flags.append("closed_form_below_floor")
    return {
        "n_total": p.n_total,
        "t_reduced": p.t_reduced,
        "H": p.H,
        "mean_n0": m.mean,
        "variance_n0": m.variance,
        "s_g_closed": closed.value,
        "s_g_closed_method": closed.method.value,
        "s_g_direct": entropy.von_neumann_entropy(d).value,
        "s_bulk": bulk,
        "ratio_g_over_bulk": closed.value / bulk if bulk > 0 else None,
        "norm_deficit": d.norm_deficit,
        "flags": ";".join(flags),
    }


def bec_report(rows: list[dict[str, Any]], params: dict[str, Any]) -> dict[str, Any]:
    report = _header("bec")
    report["params"] = params
    report["rows"] = rows
    return report


# -- engine ----------------------------------------------------------------


def load_scenario(path: str | Path) -> tuple[engine.EngineScenario, dict[str, Any]]:
    """Read a scenario JSON file and convert it to natural units (eV)."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(raw), raw


def scenario_from_dict(raw: dict[str, Any]) -> engine.EngineScenario:
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a JSON object")
    try:
        f_unit = raw.get("frequency_unit", "eV")
        t_unit = raw.get("temperature_unit", "eV")

        def reservoir(key: str) -> engine.ReservoirPhoton:
            r = raw[key]
            return engine.ReservoirPhoton(
                units.photon_energy_ev(float(r["frequency"]), f_unit),
                units.thermal_energy_ev(float(r["temperature"]), t_unit),
            )

        maser_f = raw.get("maser_frequency")
        return engine.EngineScenario(
            hot=reservoir("hot"),
            cold=reservoir("cold"),
            maser_occupation=float(raw["maser_occupation"]),
            photon_rate=float(raw.get("photon_rate", 1.0)),
            maser_frequency=None if maser_f is None else units.photon_energy_ev(float(maser_f), f_unit),
        )
    except KeyError as exc:
        raise ScenarioError(f"scenario is missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ScenarioError(str(exc)) from exc


def engine_report(s: engine.EngineScenario, name: str = "") -> dict[str, Any]:
    carnot = engine.carnot_quantum_bound(s)
    flux = engine.flux_inequality(s)
    verdict = engine.maser_entropy_verdict(s)
    report = _header("engine")
    report["scenario"] = {
        "name": name,
        "hot": {"energy_ev": s.hot.frequency, "kT_ev": s.hot.temperature, "x": s.hot.x},
        "cold": {"energy_ev": s.cold.frequency, "kT_ev": s.cold.temperature, "x": s.cold.x},
        "maser_energy_ev": s.maser_frequency,
        "maser_occupation": s.maser_occupation,
        "photon_rate": s.photon_rate,
    }
    report["budget"] = {
        "threshold": engine.cycle_entropy_budget(s, 0.0),
        "above_threshold": engine.cycle_entropy_budget(s, 1.0 / (2.0 * s.maser_occupation)),
        "thermal_like": engine.cycle_entropy_budget(s, 1.0 / s.maser_occupation),
    }
    report["carnot"] = carnot._asdict()
    report["flux"] = flux._asdict()
    report["verdict"] = verdict._asdict()
    report["rows"] = [
        {"quantity": "efficiency", "value": carnot.efficiency},
        {"quantity": "carnot_bound", "value": carnot.bound},
        {"quantity": "corrected_bound", "value": flux.corrected_bound},
        {"quantity": "flux_lhs", "value": flux.lhs},
        {"quantity": "delta_s_maser", "value": verdict.delta_s_maser},
        {"quantity": "delta_s_thermal", "value": verdict.delta_s_thermal},
        {"quantity": "maser_to_thermal_ratio", "value": verdict.ratio},
        {"quantity": "verdict", "value": verdict.classification},
    ]
    return report


# -- evolution -------------------------------------------------------------


def load_rate_table(path: str | Path) -> dynamics.LadderModel:
    """CSV with header n,gain,loss listing every rung from 0 upward."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: empty rate table")
    try:
        ns = [int(r["n"]) for r in rows]
        gains = [float(r["gain"]) for r in rows]
        losses = [float(r["loss"]) for r in rows]
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: rate table needs numeric columns n,gain,loss") from exc
    if ns != list(range(len(ns))):
        raise ValueError(f"{path}: rungs must be listed as n = 0, 1, 2, ...")
    return dynamics.table_model(gains, losses)


def initial_state(text: str, n_max: int) -> fock.FockDistribution:
    """``vacuum``, ``n:K`` (point mass) or ``thermal:NBAR`` cut to the ladder."""
    if text == "vacuum":
        return fock.point_mass(0, n_max)
    kind, _, arg = text.partition(":")
    if kind == "n":
        return fock.point_mass(int(arg), n_max)
    if kind == "thermal":
        d = fock.thermal_distribution(float(arg))
        p = d.padded(n_max + 1)[: n_max + 1]
        return fock.FockDistribution(p / p.sum(), kind="thermal", params=d.params)
    raise ValueError(f"unknown initial state {text!r}; use vacuum, n:K or thermal:NBAR")


def evolve_report(
    model: dynamics.LadderModel,
    initial: fock.FockDistribution,
    t_final: float,
    dt: float | None = None,
    samples: int = 50,
    method: str = "step",
) -> dict[str, Any]:
    ss = dynamics.steady_state(model)
    if dt is None:
        dt = model.stable_dt()
    steps = max(1, math.ceil(t_final / dt - 1e-9)) if t_final > 0 else 0
    stride = max(1, steps // max(samples, 1)) if steps else None
    ev = dynamics.evolve(model, initial, t_final, dt, sample_every=stride, method=method)
    n = np.arange(model.n_max + 1, dtype=float)
    rows = []
    for smp in ev.samples or [dynamics.Sample(t_final, ev.final.probs)]:
        p = np.clip(smp.probs, 0.0, None)
        p = p / p.sum()
        mean = float(n @ p)
        rows.append(
            {
                "t": smp.t,
                "mean": mean,
                "variance": float(((n - mean) ** 2) @ p),
                "entropy": entropy.von_neumann_entropy(p).value,
            }
        )
    report = _header("evolve")
    report["model"] = {"name": model.name, "n_max": model.n_max, "params": dict(model.params)}
    report["integration"] = {"t_final": t_final, "dt": ev.dt, "steps": ev.steps, "method": method}
    report["rows"] = rows
    report["final"] = {
        "tv_to_steady_state": fock.total_variation(ev.final, ss),
        "steady_state_entropy": entropy.von_neumann_entropy(ss).value,
        "final_entropy": entropy.von_neumann_entropy(ev.final).value,
    }
    if model.name == "laser":
        p = fock.LaserParams(**model.params)
        closed = laser_closed_entropy(p)
        if closed is not None:
            report["final"]["closed_form_entropy"] = closed.value
    return report


# -- Table I -----------------------------------------------------------------


def table1_report(n_h: float, n_l: float, nu_over_q: float, kappa: float) -> dict[str, Any]:
    """Linewidth and entropy flux on either side of threshold.

    In steady state the gain α is essentially the loss ν/Q, so ν/Q stands in
    for α in both linewidths.
    """
    lw_below = dynamics.schawlow_townes_fwhm(nu_over_q, n_h, dynamics.Regime.BELOW)
    lw_above = dynamics.schawlow_townes_fwhm(nu_over_q, n_l, dynamics.Regime.ABOVE)
    fx_below = entropy.entropy_flux_thermal(n_h, kappa).value
    fx_above = entropy.entropy_flux_maser(n_l, kappa).value

    def ratio(a, b):
        return a / b if b != 0 else None

    rows = [
        {"quantity": "linewidth", "below_threshold": lw_below, "above_threshold": lw_above, "ratio": ratio(lw_below, lw_above)},
        {"quantity": "entropy_flux", "below_threshold": fx_below, "above_threshold": fx_above, "ratio": ratio(fx_below, fx_above)},
    ]
    report = _header("table1")
    report["params"] = {"n_h": n_h, "n_l": n_l, "nu_over_q": nu_over_q, "kappa": kappa}
    report["rows"] = rows
    equal = n_h == n_l
    report["checks"] = {
        "equal_occupations": equal,
        "linewidth_factor_two": (abs(rows[0]["ratio"] - 2.0) <= 1e-12) if equal else None,
        "flux_factor_two": (
            abs(rows[1]["ratio"] - 2.0) <= 1e-12 if rows[1]["ratio"] is not None else None
        )
        if equal
        else None,
    }
    return report


# -- sweeps ------------------------------------------------------------------


SWEEP_PARAMETERS = ("pump_ratio", "reduced_temperature", "occupation")


def sweep_values(start: float, stop: float, steps: int) -> list[float]:
    if steps < 2:
        raise ValueError("a sweep needs at least 2 steps")
    if not start < stop:
        raise ValueError("sweep start must be below stop")
    return [float(v) for v in np.linspace(start, stop, steps)]


def _pump_row(value: float, fixed: dict[str, Any]) -> dict[str, Any]:
    gamma = float(fixed.get("gamma", 1.0))
    beta = float(fixed["beta"])
    row: dict[str, Any] = {"pump_ratio": value}
    try:
        p = fock.LaserParams(alpha=value * gamma, beta=beta, gamma=gamma)
        rep = laser_report(p, float(fixed.get("trunc_tol", fock.TRUNC_TOL)))
        exact = rep["rows"][0]
        row.update(
            {
                "A": p.A,
                "B": p.B,
                "mean": exact["mean"],
                "variance": exact["variance"],
                "s_direct": exact["s_direct"],
                "s_closed": exact["s_closed"],
                "closed_method": exact["closed_method"],
                "linewidth": rep["linewidth"].get("fwhm"),
                "error": rep["linewidth"].get("error", ""),
            }
        )
    except (ValueError, NumericalError) as exc:
        row["error"] = str(exc)
    return row


def _temperature_row(value: float, fixed: dict[str, Any]) -> dict[str, Any]:
    try:
        p = fock.BecParams(
            int(fixed["n_total"]),
            value,
            float(fixed.get("kappa_wall", 1.0)),
            float(fixed.get("exponent", 3.0)),
        )
        row = bec_row(p, float(fixed.get("floor", entropy.BEC_CLOSED_FORM_FLOOR)))
        row["error"] = ""
        return row
    except (ValueError, NumericalError) as exc:
        return {"t_reduced": value, "error": str(exc)}


def _occupation_row(value: float, fixed: dict[str, Any]) -> dict[str, Any]:
    row: dict[str, Any] = {"n_bar": value}
    try:
        row["s_thermal"] = entropy.thermal_entropy_closed_form(value).value
        row["s_high_t"] = entropy.thermal_entropy_high_t(value).value
        ratio = fixed.get("pump_ratio")
        row["s_laser"] = (
            entropy.laser_entropy_from_occupation(value, float(ratio)).value if ratio is not None else None
        )
        row["delta_s_thermal"] = entropy.entropy_flux_thermal(value, 1.0).value
        row["delta_s_maser"] = entropy.entropy_flux_maser(value, 1.0).value
        row["error"] = ""
    except ValueError as exc:
        row["error"] = str(exc)
    return row


_SWEEP_ROW = {
    "pump_ratio": _pump_row,
    "reduced_temperature": _temperature_row,
    "occupation": _occupation_row,
}


def sweep_report(
    parameter: str,
    start: float,
    stop: float,
    steps: int,
    fixed: dict[str, Any],
    outputs: Sequence[str] | None = None,
    jobs: int = 1,
) -> dict[str, Any]:
    """Rows are independent; with ``jobs > 1`` they are computed concurrently
    but always returned in sweep order."""
    if parameter not in _SWEEP_ROW:
        raise ValueError(f"unknown sweep parameter {parameter!r}")
    values = sweep_values(start, stop, steps)
    row_fn = _SWEEP_ROW[parameter]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda v: row_fn(v, fixed), values))
    else:
        rows = [row_fn(v, fixed) for v in values]
    if outputs:
        key = {"pump_ratio": "pump_ratio", "reduced_temperature": "t_reduced", "occupation": "n_bar"}[parameter]
        keep = [key, *outputs, "error"]
        rows = [{k: r.get(k) for k in keep} for r in rows]
    report = _header("sweep")
    report["sweep"] = {"parameter": parameter, "start": start, "stop": stop, "steps": steps}
    report["fixed"] = dict(sorted(fixed.items()))
    report["rows"] = rows
    return report


# -- formatting ----------------------------------------------------------------


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: Iterable[dict[str, Any]], columns: Sequence[str] | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = []
        for r in rows:
            for k in r:
                if k not in columns:
                    columns.append(k)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def to_json(report: dict[str, Any]) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
