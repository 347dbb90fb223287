"""Entropies (in units of k_B) and entropy fluxes.

Every closed-form expression is labelled with its method so that reports
can set it beside the direct sum without ambiguity.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidityWarning
from .fock import (
    SHIFTED_POISSON_MIN_EXCESS,
    BecParams,
    FockDistribution,
    LaserParams,
    bec_ground_distribution,
)

BULK_GAS_COEFFICIENT = 3.6
BEC_CLOSED_FORM_FLOOR = 1.0


class Method(str, enum.Enum):
    DIRECT_SUM = "direct_sum"
    CLOSED_FORM_LASER = "closed_form_laser"
    CLOSED_FORM_THERMAL = "closed_form_thermal"
    CLOSED_FORM_HIGH_T = "closed_form_high_t"
    CLOSED_FORM_BEC = "closed_form_bec"
    CLOSED_FORM_BULK_GAS = "closed_form_bulk_gas"


@dataclass(frozen=True)
class EntropyValue:
    value: float
    method: Method
    flagged: bool = False
    note: str = ""


@dataclass(frozen=True)
class EntropyFlux:
    """Entropy per unit time; ``kappa`` is the photon throughput in k_B units."""

    value: float
    kappa: float


def von_neumann_entropy(d: FockDistribution | np.ndarray) -> EntropyValue:
    """−Σ p ln p over the diagonal, skipping exact zeros."""
    p = d.probs if isinstance(d, FockDistribution) else np.asarray(d, dtype=float)
    p = p[p > 0]
    s = -float(np.dot(p, np.log(p)))
    # rounding can push a point mass a hair below zero; + 0.0 drops the sign of -0.0
    return EntropyValue(max(s, 0.0) + 0.0, Method.DIRECT_SUM)


def laser_entropy_closed_form(p: LaserParams) -> EntropyValue:
    """ln√(2πA) + 1/2, the well-above-threshold laser entropy.

    A = n̄·α/(α − γ), so this is the same number as ln√(2π n̄ α/(α−γ)) + 1/2.
    """
    flagged = False
    if p.excess < SHIFTED_POISSON_MIN_EXCESS:
        warnings.warn(
            f"laser closed form used at (alpha - gamma)/gamma = {p.excess:.4g}",
            ValidityWarning,
            stacklevel=2,
        )
        flagged = True
    return EntropyValue(
        0.5 * math.log(2.0 * math.pi * p.A) + 0.5, Method.CLOSED_FORM_LASER, flagged
    )


def laser_entropy_from_occupation(n_bar: float, pump_ratio: float) -> EntropyValue:
    """Same closed form written with n̄ and α/γ: ln√(2π n̄ α/(α−γ)) + 1/2."""
    if pump_ratio <= 1.0:
        raise ValueError("pump_ratio must exceed 1")
    A = n_bar * pump_ratio / (pump_ratio - 1.0)
    return EntropyValue(0.5 * math.log(2.0 * math.pi * A) + 0.5, Method.CLOSED_FORM_LASER)


def thermal_entropy_closed_form(n_bar: float) -> EntropyValue:
    """Black-body single-mode entropy (n̄+1)ln(n̄+1) − n̄ ln n̄."""
    if n_bar < 0:
        raise ValueError(f"n_bar must be nonnegative, got {n_bar}")
    if n_bar == 0:
        return EntropyValue(0.0, Method.CLOSED_FORM_THERMAL)
    # log1p form keeps precision for both tiny and huge n̄
    value = math.log1p(n_bar) + n_bar * math.log1p(1.0 / n_bar)
    return EntropyValue(value, Method.CLOSED_FORM_THERMAL)


def thermal_entropy_high_t(n_bar_high: float) -> EntropyValue:
    """ln n̄_high + 1, the k_BT ≫ ħν limit."""
    if n_bar_high <= 0:
        raise ValueError("n_bar_high must be positive")
    return EntropyValue(math.log(n_bar_high) + 1.0, Method.CLOSED_FORM_HIGH_T)


def entropy_flux_maser(n_bar_m: float, kappa: float) -> EntropyFlux:
    """κ/(2n̄_m). With κ = ±1 this is the entropy carried by one photon."""
    if n_bar_m <= 0:
        raise ValueError("n_bar_m must be positive")
    return EntropyFlux(kappa / (2.0 * n_bar_m), kappa)


def entropy_flux_thermal(n_bar_high: float, kappa: float) -> EntropyFlux:
    """κ/n̄_high for hot thermal light, n̄_high = k_BT/ħν."""
    if n_bar_high <= 0:
        raise ValueError("n_bar_high must be positive")
    return EntropyFlux(kappa / n_bar_high, kappa)


def bec_ground_entropy_closed_form(
    p: BecParams, floor: float = BEC_CLOSED_FORM_FLOOR
) -> EntropyValue:
    """ln√(2πH) + 1/2 with H = N t³.

    Below ``floor`` the closed form is meaningless (it goes to −∞ as
    T → 0), so the direct sum over the ground-state distribution is
    returned instead, flagged.
    """
    H = p.H
    # N t**3 lands a few ulps off integers such as 1.0
    if H < floor * (1.0 - 1e-12):
        s = von_neumann_entropy(bec_ground_distribution(p))
        return EntropyValue(
            s.value,
            Method.DIRECT_SUM,
            flagged=True,
            note=f"H = {H:.6g} below closed-form floor {floor:g}",
        )
    return EntropyValue(0.5 * math.log(2.0 * math.pi * H) + 0.5, Method.CLOSED_FORM_BEC)


def bulk_bose_gas_entropy(n_total: float, t_reduced: float) -> EntropyValue:
    """Thermodynamic-limit Bose gas entropy 3.6·N·t³."""
    if not 0.0 <= t_reduced < 1.0:
        raise ValueError("t_reduced must lie in [0, 1)")
    if n_total <= 0:
        raise ValueError("n_total must be positive")
    return EntropyValue(
        BULK_GAS_COEFFICIENT * n_total * t_reduced**3, Method.CLOSED_FORM_BULK_GAS
    )
