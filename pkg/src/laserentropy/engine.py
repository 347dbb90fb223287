"""Entropy bookkeeping for the maser as a quantum heat engine.

Units are natural (ħ = k_B = 1): a reservoir is a photon energy and a
temperature in the same energy unit, and entropies are in units of k_B.
The conversion from eV, K or Hz happens in :mod:`laserentropy.units`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .fock import planck_occupancy

EQUALITY_TOL = 1e-12
# δS_maser / δS_thermal below this is reported as negligible
NEGLIGIBLE_RATIO = 1e-2


@dataclass(frozen=True)
class ReservoirPhoton:
    frequency: float
    temperature: float

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValueError(f"reservoir frequency must be positive, got {self.frequency}")
        if not self.temperature > 0:
            raise ValueError(f"reservoir temperature must be positive, got {self.temperature}")

    @property
    def x(self) -> float:
        """ħν/k_BT; also the entropy carried off per photon at high temperature."""
        return self.frequency / self.temperature

    @property
    def n_bar(self) -> float:
        return planck_occupancy(self.x)

    @property
    def n_bar_high(self) -> float:
        return self.temperature / self.frequency


@dataclass(frozen=True)
class EngineScenario:
    """Hot and cold pump photons, the maser mode, and the photon throughput.

    ``maser_frequency`` defaults to ν_h − ν_c; if given it must match that
    to 1e-12 relative.
    """

    hot: ReservoirPhoton
    cold: ReservoirPhoton
    maser_occupation: float
    photon_rate: float = 1.0
    maser_frequency: float | None = None

    def __post_init__(self):
        nu_m = self.hot.frequency - self.cold.frequency
        if nu_m <= 0:
            raise ValueError("cold photon frequency must be below the hot one")
        if self.maser_frequency is None:
            object.__setattr__(self, "maser_frequency", nu_m)
        elif abs(self.maser_frequency - nu_m) > EQUALITY_TOL * self.hot.frequency:
            raise ValueError(
                f"maser frequency {self.maser_frequency!r} != hot - cold = {nu_m!r}"
            )
        if self.cold.temperature > self.hot.temperature:
            raise ValueError("cold reservoir is hotter than the hot reservoir")
        if not self.maser_occupation > 0:
            raise ValueError("maser occupation must be positive")

    @property
    def rates(self) -> tuple[float, float, float]:
        """(dn_h/dt, dn_m/dt, dn_c/dt): one hot photon in, one maser and one cold out."""
        r = self.photon_rate
        return -r, r, r


class CarnotCheck(NamedTuple):
    efficiency: float
    bound: float
    satisfied: bool
    marginal: bool


class FluxBalance(NamedTuple):
    lhs: float
    satisfied: bool
    hot_term: float
    maser_term: float
    cold_term: float
    hot_term_planck: float
    maser_negligible: bool
    corrected_bound: float


class Verdict(NamedTuple):
    delta_s_maser: float
    delta_s_thermal: float
    ratio: float
    classification: str


class ClassicalCycle(NamedTuple):
    delta_s: float
    engine_balance: float
    q_out: float
    work: float
    efficiency: float
    bound: float


def cycle_entropy_budget(s: EngineScenario, delta_s_maser: float) -> float:
    """Entropy change per cycle, −x_h + δS_maser + x_c.

    One hot photon is absorbed, one maser photon and one cold photon are
    emitted. δS_maser is chosen by the caller: 0 at threshold, 1/(2n̄_m)
    well above threshold, 1/n̄ for thermal-like output.
    """
    return -s.hot.x + delta_s_maser + s.cold.x


def carnot_quantum_bound(s: EngineScenario) -> CarnotCheck:
    if not s.hot.temperature >= s.cold.temperature:
        raise ValueError("need T_h >= T_c")
    efficiency = s.maser_frequency / s.hot.frequency
    bound = 1.0 - s.cold.temperature / s.hot.temperature
    return CarnotCheck(
        efficiency,
        bound,
        efficiency <= bound + EQUALITY_TOL,
        abs(efficiency - bound) <= EQUALITY_TOL,
    )


def corrected_efficiency_bound(s: EngineScenario) -> float:
    """Largest ν_m/ν_h allowed once the maser's own entropy flux is counted.

    From −x_h + 1/(2n̄_m) + x_c ≥ 0 with ν_c = ν_h − ν_m:
    ν_m/ν_h ≤ 1 − T_c/T_h + (T_c/T_h)/(2 n̄_m x_h).
    """
    tr = s.cold.temperature / s.hot.temperature
    return 1.0 - tr + tr / (2.0 * s.maser_occupation * s.hot.x)


def flux_inequality(s: EngineScenario) -> FluxBalance:
    """Entropy production rate x_h ṅ_h + ṅ_m/(2n̄_m) + x_c ṅ_c ≥ 0.

    ``hot_term_planck`` replaces x_h by 1/n̄_h with the Planck occupation,
    the form the hot term takes at high temperature. The maser term is
    called negligible when it is under 1% of the hot term.
    """
    n_h, n_m, n_c = s.rates
    hot = s.hot.x * n_h
    maser = n_m / (2.0 * s.maser_occupation)
    cold = s.cold.x * n_c
    lhs = hot + maser + cold
    negligible = abs(maser) <= NEGLIGIBLE_RATIO * abs(hot) if hot else maser == 0
    return FluxBalance(
        lhs=lhs,
        satisfied=lhs >= -EQUALITY_TOL * max(abs(hot), abs(cold), 1e-300),
        hot_term=hot,
        maser_term=maser,
        cold_term=cold,
        hot_term_planck=n_h / s.hot.n_bar,
        maser_negligible=negligible,
        corrected_bound=corrected_efficiency_bound(s),
    )


def maser_entropy_verdict(s: EngineScenario) -> Verdict:
    """Compare one maser photon's entropy with one hot thermal photon's."""
    ds_m = 1.0 / (2.0 * s.maser_occupation)
    ds_t = 1.0 / s.hot.n_bar_high
    ratio = ds_m / ds_t
    return Verdict(ds_m, ds_t, ratio, "negligible" if ratio < NEGLIGIBLE_RATIO else "comparable")


def classical_carnot_check(
    q_in: float,
    q_out: float | None,
    t_h: float,
    t_c: float,
    s_engine: float = 0.0,
) -> ClassicalCycle:
    """Classical engine drawing q_in at t_h and dumping q_out at t_c.

    ``delta_s`` is the entropy change of the reservoirs, −q_in/t_h + q_out/t_c.
    ``engine_balance`` is the working substance's balance over one cycle,
    q_in/t_h + s_engine − q_out/t_c, which must vanish for a closed cycle.
    Leaving ``q_out`` as None fixes it from that closure, so friction
    (s_engine > 0) pushes the efficiency below 1 − t_c/t_h.
    """
    if q_in <= 0:
        raise ValueError("q_in must be positive")
    if t_h <= 0 or t_c < 0:
        raise ValueError("temperatures must be positive")
    if q_out is None:
        q_out = t_c * (q_in / t_h + s_engine)
    if q_out < 0:
        raise ValueError("q_out must be nonnegative")
    if t_c == 0:
        sink = 0.0 if q_out == 0 else math.inf
    else:
        sink = q_out / t_c
    work = q_in - q_out
    return ClassicalCycle(
        delta_s=-q_in / t_h + sink,
        engine_balance=q_in / t_h + s_engine - sink,
        q_out=q_out,
        work=work,
        efficiency=work / q_in,
        bound=1.0 - t_c / t_h,
    )
