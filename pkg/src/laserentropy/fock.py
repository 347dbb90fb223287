"""Occupation-number distributions for the laser field and the condensate mode.

All constructors return a :class:`FockDistribution`: a normalized probability
vector over n = 0..n_max, built in the log domain and stored linearly.
Rungs that underflow are stored as exact zeros.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from .errors import TruncationError, ValidityWarning
from .numerics import log_factorial_real

TRUNC_TOL = 1e-12
MAX_RUNGS = 10_000_000
BEC_DEFICIT_FLAG = 1e-3
SHIFTED_POISSON_MIN_EXCESS = 0.1


@dataclass(frozen=True)
class LaserParams:
    """Rate constants of the single-mode laser.

    alpha is the linear gain, beta the saturation coefficient and gamma the
    cavity loss rate (nu/Q). All three are rates in the same time unit.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v}")

    @property
    def A(self) -> float:
        return self.alpha**2 / (self.beta * self.gamma)

    @property
    def B(self) -> float:
        return self.alpha / self.beta

    @property
    def n_bar(self) -> float:
        """Above-threshold mean photon number A − B = (α/γ)(α−γ)/γ · B."""
        return self.A - self.B

    @property
    def pump_ratio(self) -> float:
        return self.alpha / self.gamma

    @property
    def excess(self) -> float:
        """Relative excess over threshold, (α − γ)/γ."""
        return (self.alpha - self.gamma) / self.gamma

    @property
    def above_threshold(self) -> bool:
        return self.alpha > self.gamma

    def below_threshold_n_bar(self) -> float:
        """Steady state of dn/dt = α(n + 1) − γn, valid for α < γ."""
        if self.alpha >= self.gamma:
            raise ValueError("below-threshold occupation needs alpha < gamma")
        return self.alpha / (self.gamma - self.alpha)

    def gain(self, n):
        return self.alpha / (1.0 + (self.beta / self.alpha) * np.asarray(n, dtype=float))

    @classmethod
    def from_ratio(cls, pump_ratio: float, B: float, gamma: float = 1.0) -> LaserParams:
        """Build from α/γ and B = α/β, which fixes A = B·α/γ."""
        alpha = pump_ratio * gamma
        return cls(alpha=alpha, beta=alpha / B, gamma=gamma)

    def as_dict(self) -> dict[str, float]:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


@dataclass(frozen=True)
class BecParams:
    """N atoms in a trap at reduced temperature t = T/T_c.

    ``exponent`` is the power in the condensate fraction 1 − t**exponent;
    3 for a parabolic trap.
    """

    n_total: int
    t_reduced: float
    kappa_wall: float = 1.0
    exponent: float = 3.0

    def __post_init__(self):
        if int(self.n_total) != self.n_total or self.n_total < 1:
            raise ValueError(f"n_total must be a positive integer, got {self.n_total}")
        if not 0.0 <= self.t_reduced < 1.0:
            raise ValueError(f"t_reduced must lie in [0, 1), got {self.t_reduced}")
        if self.kappa_wall <= 0:
            raise ValueError("kappa_wall must be positive")
        if self.exponent <= 0:
            raise ValueError("exponent must be positive")

    @property
    def H(self) -> float:
        """Mean number of non-condensed atoms, N·t**exponent."""
        return self.n_total * self.t_reduced**self.exponent

    @property
    def mean_condensate(self) -> float:
        return self.n_total * (1.0 - self.t_reduced**self.exponent)

    def as_dict(self) -> dict[str, float]:
        return {
            "n_total": self.n_total,
            "t_reduced": self.t_reduced,
            "kappa_wall": self.kappa_wall,
            "exponent": self.exponent,
        }


@dataclass(frozen=True)
class FockDistribution:
    probs: np.ndarray
    tail_mass_bound: float = 0.0
    kind: str = "custom"
    params: dict[str, Any] = field(default_factory=dict)
    # mass missing before renormalization (approximate forms only)
    norm_deficit: float = 0.0
    log_normalization: float | None = None
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a non-empty 1-d vector")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and nonnegative")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.probs.size)

    def total(self) -> float:
        return float(self.probs.sum())

    def padded(self, size: int) -> np.ndarray:
        out = np.zeros(max(size, self.probs.size))
        out[: self.probs.size] = self.probs
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,prob\n")
        for n, p in enumerate(self.probs):
            buf.write(f"{n},{float(p)!r}\n")
        return buf.getvalue()

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "params": dict(self.params),
            "n_max": self.n_max,
            "tail_mass_bound": self.tail_mass_bound,
            "norm_deficit": self.norm_deficit,
            "flags": list(self.flags),
            "probs": [float(p) for p in self.probs],
        }


class Moments(NamedTuple):
    mean: float
    variance: float
    mode: int


def moments(d: FockDistribution) -> Moments:
    p = d.probs
    n = np.arange(p.size, dtype=float)
    mean = float(np.dot(n, p))
    variance = float(np.dot((n - mean) ** 2, p))
    return Moments(mean, variance, int(np.argmax(p)))


def total_variation(d1: FockDistribution | np.ndarray, d2: FockDistribution | np.ndarray) -> float:
    p = d1.probs if isinstance(d1, FockDistribution) else np.asarray(d1, dtype=float)
    q = d2.probs if isinstance(d2, FockDistribution) else np.asarray(d2, dtype=float)
    size = max(p.size, q.size)
    pp = np.zeros(size)
    qq = np.zeros(size)
    pp[: p.size] = p
    qq[: q.size] = q
    return 0.5 * float(np.abs(pp - qq).sum())


def probs_from_ratios(ratios: np.ndarray) -> tuple[np.ndarray, float]:
    """Normalize a ladder given the successive ratios ρ_{n+1}/ρ_n.

    Returns the normalized vector and ln Σ u_n where u_0 = 1. The
    recursion is run multiplicatively outward from the mode so that the
    largest weight is 1 and only the tails can underflow.
    """
    ratios = np.asarray(ratios, dtype=float)
    size = ratios.size + 1
    with np.errstate(divide="ignore"):
        log_r = np.log(ratios)
    cum = np.concatenate(([0.0], np.cumsum(log_r)))
    m = int(np.argmax(cum))

    u = np.empty(size)
    u[m] = 1.0
    if m + 1 < size:
        u[m + 1 :] = np.cumprod(ratios[m:])
    if m > 0:
        u[m - 1 :: -1] = np.cumprod(1.0 / ratios[m - 1 :: -1])
    log_um = math.fsum(log_r[:m].tolist()) if m > 0 else 0.0
    s = float(u.sum())
    return u / s, log_um + math.log(s)


def _check_tol(trunc_tol: float) -> None:
    if not 0 < trunc_tol < 1e-3:
        raise ValueError(f"trunc_tol must lie in (0, 1e-3), got {trunc_tol}")


def _laser_log_weights(A: float, B: float, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1, dtype=float)
    return n * math.log(A) - _lgamma(n + B + 1.0) + log_factorial_real(B)


_lgamma_u = np.frompyfunc(math.lgamma, 1, 1)


def _lgamma(x: np.ndarray) -> np.ndarray:
    return _lgamma_u(x).astype(float)


def _laser_ladder(A: float, B: float, trunc_tol: float, max_rungs: int) -> tuple[int, float]:
    """Smallest doubling of the ladder whose analytic tail bound is below tol.

    Past the mode the ratio A/(n+1+B) falls monotonically, so the mass
    above n_max is at most ρ_{n_max}·r/(1 − r) with r the next ratio.
    """
    n_max = int(max(0.0, A - B) + 12.0 * math.sqrt(A + 1.0) + 64)
    while True:
        n_max = min(n_max, max_rungs - 1)
        lw = _laser_log_weights(A, B, n_max)
        top = float(lw[-1] - (lw.max() + math.log(np.exp(lw - lw.max()).sum())))
        r = A / (n_max + 1 + B)
        tail = math.exp(top) * r / (1.0 - r) if r < 1.0 else math.inf
        if tail < trunc_tol:
            return n_max, tail
        if n_max >= max_rungs - 1:
            raise TruncationError(max_rungs, tail)
        n_max *= 2


def laser_exact_distribution(
    p: LaserParams, trunc_tol: float = TRUNC_TOL, max_rungs: int = MAX_RUNGS
) -> FockDistribution:
    """Exact steady state ρ_n = B!·Aⁿ/((n+B)!·Z) with Z = ₁F₁(1; B+1; A).

    Built from the detailed-balance ratio ρ_{n+1}/ρ_n = A/(n+1+B); the
    normalization ln Z comes out of the same recursion.
    """
    _check_tol(trunc_tol)
    A, B = p.A, p.B
    n_max, tail = _laser_ladder(A, B, trunc_tol, max_rungs)
    ratios = A / (np.arange(n_max, dtype=float) + 1.0 + B)
    probs, log_z = probs_from_ratios(ratios)
    return FockDistribution(
        probs,
        tail_mass_bound=tail,
        kind="laser_exact",
        params=p.as_dict(),
        log_normalization=log_z,
    )


def _warn_validity(p: LaserParams, what: str) -> tuple[str, ...]:
    if p.excess < SHIFTED_POISSON_MIN_EXCESS:
        msg = (
            f"{what} assumes (alpha - gamma)/gamma >= {SHIFTED_POISSON_MIN_EXCESS}; "
            f"got {p.excess:.4g}"
        )
        warnings.warn(msg, ValidityWarning, stacklevel=3)
        return ("outside_validity",)
    return ()


def laser_shifted_poisson(
    p: LaserParams, trunc_tol: float = TRUNC_TOL, max_rungs: int = MAX_RUNGS
) -> FockDistribution:
    """Well-above-threshold form ρ_n = A^(n+B) e^(−A)/(n+B)!, renormalized.

    ``norm_deficit`` keeps the mass that was missing before renormalization,
    which is how the breakdown near threshold shows up.
    """
    _check_tol(trunc_tol)
    flags = _warn_validity(p, "shifted-Poisson form")
    A, B = p.A, p.B
    n_max, tail = _laser_ladder(A, B, trunc_tol, max_rungs)
    n = np.arange(n_max + 1, dtype=float)
    logw = (n + B) * math.log(A) - A - _lgamma(n + B + 1.0)
    m = float(logw.max())
    w = np.exp(logw - m)
    s = float(w.sum())
    raw_mass = math.exp(m + math.log(s))
    return FockDistribution(
        w / s,
        tail_mass_bound=tail,
        kind="laser_shifted_poisson",
        params=p.as_dict(),
        norm_deficit=1.0 - raw_mass,
        flags=flags,
    )


def laser_gaussian(
    p: LaserParams, trunc_tol: float = TRUNC_TOL, max_rungs: int = MAX_RUNGS
) -> FockDistribution:
    """Gaussian of mean A − B and variance A on the integers n ≥ 0."""
    _check_tol(trunc_tol)
    flags = _warn_validity(p, "Gaussian form")
    A = p.A
    mean = p.n_bar
    sd = math.sqrt(A)
    z = 1.0
    while 0.5 * math.erfc(z / math.sqrt(2.0)) >= trunc_tol:
        z += 0.5
    n_max = max(0, int(math.ceil(mean + z * sd)))
    if n_max + 1 > max_rungs:
        raise TruncationError(max_rungs, 0.5 * math.erfc((max_rungs - 1 - mean) / (sd * math.sqrt(2))))
    n = np.arange(n_max + 1, dtype=float)
    w = np.exp(-((n - mean) ** 2) / (2.0 * A))
    s = float(w.sum())
    return FockDistribution(
        w / s,
        tail_mass_bound=0.5 * math.erfc((n_max + 1 - mean) / (sd * math.sqrt(2.0))),
        kind="laser_gaussian",
        params=p.as_dict(),
        norm_deficit=1.0 - s / math.sqrt(2.0 * math.pi * A),
        flags=flags,
    )


def thermal_distribution(
    n_bar: float, trunc_tol: float = TRUNC_TOL, max_rungs: int = MAX_RUNGS
) -> FockDistribution:
    """Geometric distribution n̄ⁿ/(n̄+1)^(n+1)."""
    _check_tol(trunc_tol)
    if n_bar < 0:
        raise ValueError(f"n_bar must be nonnegative, got {n_bar}")
    if n_bar == 0:
        return FockDistribution(np.array([1.0]), kind="thermal", params={"n_bar": 0.0})
    log_q = math.log(n_bar) - math.log1p(n_bar)
    # mass above n_max is q**(n_max + 1)
    n_max = max(0, int(math.ceil(math.log(trunc_tol) / log_q)) - 1)
    while (n_max + 1) * log_q >= math.log(trunc_tol):
        n_max += 1
    if n_max + 1 > max_rungs:
        raise TruncationError(max_rungs, math.exp(max_rungs * log_q))
    n = np.arange(n_max + 1, dtype=float)
    probs = np.exp(n * log_q - math.log1p(n_bar))
    return FockDistribution(
        probs / probs.sum(),
        tail_mass_bound=math.exp((n_max + 1) * log_q),
        kind="thermal",
        params={"n_bar": n_bar},
    )


def planck_occupancy(x: float) -> float:
    """Mean occupation 1/(e^x − 1) for x = ħν/k_BT."""
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    return 1.0 / math.expm1(x)


def bec_ground_distribution(p: BecParams) -> FockDistribution:
    """Condensate occupation ρ_{n0} ∝ H^(N−n0) e^(−H)/(N−n0)! for n0 in 0..N.

    The Poisson weight that would sit at n0 < 0 is dropped by
    renormalization; when that dropped mass exceeds 1e-3 the result is
    flagged, since the form is then no longer trustworthy.
    """
    N = int(p.n_total)
    H = p.H
    if H == 0.0:
        probs = np.zeros(N + 1)
        probs[N] = 1.0
        return FockDistribution(probs, kind="bec_ground", params=p.as_dict())
    m = np.arange(N, -1, -1, dtype=float)  # m = N - n0 for n0 = 0..N
    logw = m * math.log(H) - H - _lgamma(m + 1.0)
    top = float(logw.max())
    w = np.exp(logw - top)
    s = float(w.sum())
    deficit = max(0.0, 1.0 - math.exp(top + math.log(s)))
    flags: tuple[str, ...] = ()
    if deficit > BEC_DEFICIT_FLAG:
        flags = ("poisson_deficit",)
        warnings.warn(
            f"condensate distribution lost {deficit:.3g} of its mass to n0 < 0; "
            "the Poisson form is breaking down at this temperature",
            ValidityWarning,
            stacklevel=2,
        )
    return FockDistribution(
        w / s,
        kind="bec_ground",
        params=p.as_dict(),
        norm_deficit=deficit,
        flags=flags,
    )


def point_mass(n: int, n_max: int | None = None) -> FockDistribution:
    size = (n if n_max is None else n_max) + 1
    if not 0 <= n < size:
        raise ValueError("point mass index outside the ladder")
    probs = np.zeros(size)
    probs[n] = 1.0
    return FockDistribution(probs, kind="point_mass", params={"n": n})
