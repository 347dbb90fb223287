"""Regenerate every closed-form vs exact comparison into one output tree.

The output is a pure function of the code: no timestamps, fixed parameter
grids, floats written with ``repr``. Two runs give byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any

from . import dynamics, entropy, fock, numerics, reports
from .cli import bundled_scenario


def _write(root: Path, name: str, text: str, written: list[str]) -> None:
    path = root / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    written.append(name)


def normalization_rows() -> list[dict[str, Any]]:
    rows = []
    for A in (10.0, 1e2, 1e3, 1e4):
        for B in (1.0, 10.0, 1e2, 37.5):
            p = fock.LaserParams(alpha=A / B, beta=A / B**2, gamma=1.0)
            d = fock.laser_exact_distribution(p)
            series = numerics.hypergeometric_1f1_1(p.B + 1.0, p.A)
            rows.append(
                {
                    "A": A,
                    "B": B,
                    "log_z_recursion": d.log_normalization,
                    "log_z_series": series.value,
                    "relative_error": abs(math.expm1(d.log_normalization - series.value)),
                    "series_terms": series.terms_used,
                }
            )
    return rows


def asymptotic_rows() -> list[dict[str, Any]]:
    rows = []
    for B in (50.0, 100.0, 200.0):
        for factor in (1.0, 2.0, 5.0, 10.0, 20.0, 50.0):
            A = factor * B
            exact = numerics.hypergeometric_1f1_1(B + 1.0, A).value
            asym = numerics.log_hypergeometric_asymptotic(B, A)
            rows.append({"B": B, "A": A, "relative_error": abs(math.expm1(asym - exact))})
    return rows


def laser_entropy_rows(A: float = 1e4) -> list[dict[str, Any]]:
    rows = []
    for excess in (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0):
        r = 1.0 + excess
        p = fock.LaserParams.from_ratio(r, A / r)
        direct = entropy.von_neumann_entropy(fock.laser_exact_distribution(p)).value
        closed = 0.5 * math.log(2.0 * math.pi * p.A) + 0.5
        rows.append(
            {
                "excess": excess,
                "A": p.A,
                "n_bar": p.n_bar,
                "s_direct": direct,
                "s_closed": closed,
                "error": closed - direct,
            }
        )
    return rows


def reproduce(outdir: Path) -> list[str]:
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[str] = []

    above = fock.LaserParams(2.0, 2e-4, 1.0)
    below = fock.LaserParams(0.5, 1e-9, 1.0)
    near = fock.LaserParams.from_ratio(1.01, 1e4 / 1.01)
    for name, p in (("above", above), ("below", below), ("near_threshold", near)):
        rep = reports.laser_report(p, kappa=1.0)
        _write(outdir, f"laser/{name}.json", reports.to_json(rep), written)
        _write(outdir, f"laser/{name}.csv", reports.rows_to_csv(rep["rows"], reports.LASER_COLUMNS), written)
    _write(outdir, "laser/distributions_pump2.dat", reports.laser_gnuplot(fock.LaserParams.from_ratio(2.0, 50.0)), written)

    _write(outdir, "numerics/normalization.csv", reports.rows_to_csv(normalization_rows()), written)
    _write(outdir, "numerics/asymptotic.csv", reports.rows_to_csv(asymptotic_rows()), written)
    _write(outdir, "entropy/laser_closed_vs_direct.csv", reports.rows_to_csv(laser_entropy_rows()), written)

    thermal = []
    for n_bar in (0.1, 1.0, 10.0, 1e3):
        thermal.append(
            {
                "n_bar": n_bar,
                "s_closed": entropy.thermal_entropy_closed_form(n_bar).value,
                "s_direct": entropy.von_neumann_entropy(fock.thermal_distribution(n_bar)).value,
                "s_high_t": entropy.thermal_entropy_high_t(n_bar).value,
            }
        )
    _write(outdir, "entropy/thermal.csv", reports.rows_to_csv(thermal), written)

    meso = [reports.bec_row(fock.BecParams(1000, t)) for t in (0.0, 0.1)]
    _write(outdir, "bec/mesoscopic.csv", reports.rows_to_csv(meso, reports.BEC_COLUMNS), written)
    curve = [reports.bec_row(fock.BecParams(1000, t)) for t in reports.sweep_values(0.05, 0.95, 19)]
    _write(outdir, "bec/sweep_t.csv", reports.rows_to_csv(curve, reports.BEC_COLUMNS), written)

    for name in ("optical", "maser", "micromaser"):
        scenario, raw = reports.load_scenario(bundled_scenario(name))
        _write(outdir, f"engine/{name}.json", reports.to_json(reports.engine_report(scenario, name)), written)

    t1 = reports.table1_report(1e4, 1e4, 1.0, 1.0)
    _write(outdir, "table1.csv", reports.rows_to_csv(t1["rows"], reports.TABLE1_COLUMNS), written)

    laser_small = dynamics.laser_model(fock.LaserParams.from_ratio(2.0, 20.0))
    evo = reports.evolve_report(laser_small, fock.point_mass(0, laser_small.n_max), 40.0, method="power")
    _write(outdir, "evolve/laser_from_vacuum.json", reports.to_json(evo), written)
    loss = dynamics.constant_rate_model(0.0, 1.0, 5)
    evo = reports.evolve_report(loss, fock.point_mass(5), 3.0)
    _write(outdir, "evolve/pure_loss.csv", reports.rows_to_csv(evo["rows"], reports.TRAJECTORY_COLUMNS), written)
    bec = dynamics.bec_model(fock.BecParams(200, 0.3))
    evo = reports.evolve_report(bec, fock.point_mass(0, 200), 0.5)
    _write(outdir, "evolve/bec_n200_t03.json", reports.to_json(evo), written)

    pump = reports.sweep_report("pump_ratio", 0.5, 3.0, 11, {"beta": 1e-3, "gamma": 1.0})
    _write(outdir, "sweeps/pump_ratio.csv", reports.rows_to_csv(pump["rows"]), written)
    occ = reports.sweep_report("occupation", 1.0, 1e6, 5, {"pump_ratio": 2.0})
    _write(outdir, "sweeps/occupation.csv", reports.rows_to_csv(occ["rows"]), written)

    _write(outdir, "MANIFEST.txt", "\n".join(sorted(written)) + "\n", written)
    return written
