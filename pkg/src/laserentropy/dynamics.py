"""Birth-death dynamics of the diagonal density matrix.

The ladder obeys

    dρ_n/dt = −G(n+1)(n+1)ρ_n + G(n)nρ_{n−1} − L(n)nρ_n + L(n+1)(n+1)ρ_{n+1}

so the rate out of n upward is G(n+1)(n+1) and downward L(n)n. Gain from
the top rung is switched off, which makes n_max a reflecting wall.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import InstabilityError, NonNormalizableError, NumericalError
from .fock import (
    TRUNC_TOL,
    BecParams,
    FockDistribution,
    LaserParams,
    _laser_ladder,
    probs_from_ratios,
)

RateFn = Callable[[np.ndarray], np.ndarray]

NORM_DRIFT_LIMIT = 1e-6
DT_SAFETY = 1.1


@dataclass(frozen=True)
class LadderModel:
    """Gain G(n) and per-quantum loss L(n) on the rungs 0..n_max."""

    gain: RateFn
    loss: RateFn
    n_max: int
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("a ladder needs at least two rungs")
        n = np.arange(self.n_max + 2, dtype=float)
        g = self._eval(self.gain, n)
        l = self._eval(self.loss, n)
        if np.any(g[1:] < 0) or np.any(l < 0):
            raise ValueError("gain and loss rates must be nonnegative")

    @staticmethod
    def _eval(fn: RateFn, n: np.ndarray) -> np.ndarray:
        return np.broadcast_to(np.asarray(fn(n), dtype=float), n.shape).copy()

    def up_rates(self) -> np.ndarray:
        """Rate out of each rung n to n+1; zero at the top."""
        n = np.arange(self.n_max + 1, dtype=float)
        up = self._eval(self.gain, n + 1.0) * (n + 1.0)
        up[-1] = 0.0
        return up

    def down_rates(self) -> np.ndarray:
        n = np.arange(self.n_max + 1, dtype=float)
        return self._eval(self.loss, n) * n

    def max_escape_rate(self) -> float:
        return float((self.up_rates() + self.down_rates()).max())

    def stable_dt(self, safety: float = DT_SAFETY) -> float:
        rate = self.max_escape_rate()
        return math.inf if rate == 0 else 1.0 / (rate * safety)

    def generator(self):
        """Return a function applying the rate matrix to a probability vector."""
        up = self.up_rates()
        down = self.down_rates()
        out_rate = up + down
        up_in = up[:-1]
        down_in = down[1:]

        def apply(p: np.ndarray) -> np.ndarray:
            d = -out_rate * p
            d[1:] += up_in * p[:-1]
            d[:-1] += down_in * p[1:]
            return d

        return apply


def laser_model(p: LaserParams, n_max: int | None = None, trunc_tol: float = TRUNC_TOL) -> LadderModel:
    """G(n) = α/(1 + (β/α)n), L = γ."""
    if n_max is None:
        n_max, _ = _laser_ladder(p.A, p.B, trunc_tol, 10_000_000)
        n_max = max(n_max, 1)
    alpha, beta, gamma = p.alpha, p.beta, p.gamma
    return LadderModel(
        gain=lambda n: alpha / (1.0 + (beta / alpha) * n),
        loss=lambda n: np.full_like(n, gamma, dtype=float),
        n_max=n_max,
        name="laser",
        params=p.as_dict(),
    )


def bec_model(p: BecParams) -> LadderModel:
    """Condensate ladder: atoms join at κ(N − n0)(n0 + 1), leave at κH·n0.

    The gain factor κ(N − n0) is evaluated at the occupation before the
    jump, so in the G(n+1)(n+1) convention G(n) = κ(N − n + 1).
    """
    N = int(p.n_total)
    kappa = p.kappa_wall
    H = p.H
    return LadderModel(
        gain=lambda n: kappa * np.clip(N - n + 1.0, 0.0, None),
        loss=lambda n: np.full_like(n, kappa * H, dtype=float),
        n_max=N,
        name="bec",
        params=p.as_dict(),
    )


def constant_rate_model(gain: float, loss: float, n_max: int) -> LadderModel:
    """Unsaturated ladder G(n) = g, L = l; pure loss when g = 0."""
    return LadderModel(
        gain=lambda n: np.full_like(n, gain, dtype=float),
        loss=lambda n: np.full_like(n, loss, dtype=float),
        n_max=n_max,
        name="constant",
        params={"gain": gain, "loss": loss},
    )


def table_model(gains, losses) -> LadderModel:
    """Ladder from tabulated G(n) and L(n) for n = 0..n_max.

    G(0) is never used by the dynamics but must be present. Beyond the
    table the last row is held constant, so a table whose final gain
    still beats its loss describes a divergent ladder.
    """
    g = np.asarray(gains, dtype=float)
    l = np.asarray(losses, dtype=float)
    if g.shape != l.shape or g.ndim != 1:
        raise ValueError("gain and loss tables must be 1-d and the same length")
    n_max = g.size - 1

    def lookup(table):
        def fn(n):
            return table[np.clip(np.asarray(n, dtype=int), 0, n_max)]

        return fn

    return LadderModel(gain=lookup(g), loss=lookup(l), n_max=n_max, name="table")


def steady_state(m: LadderModel) -> FockDistribution:
    """Detailed-balance fixed point, ρ_{n+1}/ρ_n = G(n+1)/L(n+1)."""
    n = np.arange(1, m.n_max + 2, dtype=float)
    g = LadderModel._eval(m.gain, n)
    l = LadderModel._eval(m.loss, n)
    if np.any(l[:-1] <= 0):
        raise ValueError("steady state needs loss(n) > 0 for n >= 1")
    if g[-1] > 0 and (l[-1] <= 0 or g[-1] / l[-1] >= 1.0):
        raise NonNormalizableError(
            f"gain/loss ratio is still >= 1 at the top rung n_max={m.n_max}; "
            "the ladder does not decay and has no normalizable steady state"
        )
    probs, log_z = probs_from_ratios(g[:-1] / l[:-1])
    return FockDistribution(
        probs, kind=f"steady_state_{m.name}", params=dict(m.params), log_normalization=log_z
    )


class Sample(NamedTuple):
    t: float
    probs: np.ndarray


@dataclass
class Evolution:
    final: FockDistribution
    samples: list[Sample]
    steps: int
    dt: float
    clipped_mass: float


def evolve(
    m: LadderModel,
    initial: FockDistribution,
    t_final: float,
    dt: float | None = None,
    sample_every: int | None = None,
    method: str = "step",
) -> Evolution:
    """Classic RK4 on the tridiagonal generator with a fixed step.

    ``sample_every`` keeps a copy of the state every that many steps (and at
    the start and end). The run aborts if total probability drifts by more
    than 1e-6, which only happens when the step is unstable.

    ``method="power"`` applies the same RK4 step as a dense propagator raised
    to the required power by repeated squaring. The map is identical; it
    only pays off for long runs on ladders of at most a few thousand rungs.
    """
    if method not in ("step", "power"):
        raise ValueError(f"unknown method {method!r}")
    if t_final < 0:
        raise ValueError("t_final must be nonnegative")
    limit = m.stable_dt(1.0)
    if dt is None:
        dt = m.stable_dt()
    elif dt > limit:
        raise InstabilityError(f"dt = {dt:.3e} exceeds the step-size bound", m.stable_dt())
    p = initial.padded(m.n_max + 1)[: m.n_max + 1].copy()
    if initial.n_max > m.n_max and initial.probs[m.n_max + 1 :].sum() > 0:
        raise ValueError("initial distribution has mass above the ladder top")
    steps = 0 if t_final == 0 else max(1, math.ceil(t_final / dt - 1e-9))
    h = t_final / steps if steps else 0.0
    if method == "power":
        p, samples = _evolve_power(m, p, steps, h, sample_every)
    else:
        p, samples = _evolve_steps(m, p, steps, h, sample_every)
    negative = p < 0
    clipped = float(-p[negative].sum())
    if clipped > 1e-12:
        raise NumericalError(f"negative probability mass {clipped:.3e} after integration")
    p[negative] = 0.0
    final = FockDistribution(p / p.sum(), kind=f"evolved_{m.name}", params=dict(m.params))
    return Evolution(final, samples, steps, h, clipped)


def _check_norm(p: np.ndarray, step: int, m: LadderModel) -> None:
    drift = abs(float(p.sum()) - 1.0)
    if not math.isfinite(drift) or drift > NORM_DRIFT_LIMIT:
        raise InstabilityError(
            f"probability drifted by {drift:.3e} at step {step}", m.stable_dt() / 2
        )


def _evolve_steps(m, p, steps, h, sample_every):
    q = m.generator()
    samples = [Sample(0.0, p.copy())] if sample_every else []
    check_every = max(1, min(sample_every or 256, 256))
    for k in range(1, steps + 1):
        k1 = q(p)
        k2 = q(p + 0.5 * h * k1)
        k3 = q(p + 0.5 * h * k2)
        k4 = q(p + h * k3)
        p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if k % check_every == 0 or k == steps:
            _check_norm(p, k, m)
        if sample_every and (k % sample_every == 0 or k == steps):
            samples.append(Sample(k * h, p.copy()))
    return p, samples


def rk4_propagator(m: LadderModel, h: float) -> np.ndarray:
    """Dense one-step RK4 map I + hQ + (hQ)²/2 + (hQ)³/6 + (hQ)⁴/24."""
    up = m.up_rates()
    down = m.down_rates()
    q = np.diag(-(up + down)) + np.diag(up[:-1], -1) + np.diag(down[1:], 1)
    hq = h * q
    s = np.eye(q.shape[0])
    term = np.eye(q.shape[0])
    for k in range(1, 5):
        term = term @ hq / k
        s = s + term
    return s


def _apply_power(s: np.ndarray, k: int, p: np.ndarray) -> np.ndarray:
    while k:
        if k & 1:
            p = s @ p
        k >>= 1
        if k:
            s = s @ s
    return p


def _evolve_power(m, p, steps, h, sample_every):
    s = rk4_propagator(m, h)
    samples = [Sample(0.0, p.copy())] if sample_every else []
    if not sample_every:
        p = _apply_power(s, steps, p)
        _check_norm(p, steps, m)
        return p, samples
    block = np.linalg.matrix_power(s, sample_every)
    done = 0
    while done + sample_every <= steps:
        p = block @ p
        done += sample_every
        _check_norm(p, done, m)
        samples.append(Sample(done * h, p.copy()))
    if done < steps:
        p = _apply_power(s, steps - done, p)
        _check_norm(p, steps, m)
        samples.append(Sample(steps * h, p.copy()))
    return p, samples


def evolve_diagonal(
    m: LadderModel,
    initial: FockDistribution,
    t_final: float,
    dt: float | None = None,
    method: str = "step",
) -> FockDistribution:
    return evolve(m, initial, t_final, dt, method=method).final


# -- coherence, field envelope and linewidth --------------------------------


class Regime(str, enum.Enum):
    ABOVE = "above_threshold"
    BELOW = "below_threshold"


@dataclass(frozen=True)
class CoherenceDecay:
    eta: int
    d_coefficient: float

    def __post_init__(self):
        if self.eta < 0 or self.d_coefficient < 0:
            raise ValueError("eta and D must be nonnegative")

    @property
    def rate(self) -> float:
        return self.eta**2 * self.d_coefficient


@dataclass(frozen=True)
class Spectrum:
    center_frequency: float
    fwhm: float
    regime: Regime


class Envelope(NamedTuple):
    ratio: float
    amplitude: float
    phase: float


class FieldRate(NamedTuple):
    rate: float
    via_occupation: float


def phase_diffusion(p: LaserParams) -> float:
    """D = α/(4n̄) above threshold."""
    if not p.above_threshold:
        raise ValueError("phase diffusion coefficient α/4n̄ needs alpha > gamma")
    return p.alpha / (4.0 * p.n_bar)


def coherence_decay_factor(c: CoherenceDecay, t: float) -> float:
    """ρ_{n,n+η}(t)/ρ_{n,n+η}(0) = exp(−η²Dt)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return math.exp(-c.rate * t)


def mean_field_envelope(p: LaserParams, e0: float, t: float, frequency: float = 0.0) -> Envelope:
    """|⟨E(t)⟩|/|⟨E(0)⟩| = exp(−Dt); the carrier phase ν·t is returned apart."""
    ratio = math.exp(-phase_diffusion(p) * t)
    return Envelope(ratio, e0 * ratio, frequency * t)


def schawlow_townes_fwhm(alpha: float, n_bar: float, regime: Regime | str) -> float:
    """α/(2n̄) above threshold, α/n̄ below."""
    regime = Regime(regime)
    if n_bar <= 0:
        raise ValueError("n_bar must be positive")
    return alpha / (2.0 * n_bar) if regime is Regime.ABOVE else alpha / n_bar


def linewidth(p: LaserParams, regime: Regime | str | None = None, center_frequency: float = 0.0) -> Spectrum:
    """Lorentzian width from the occupation appropriate to each side of threshold.

    Above: n̄ = A − B and Δν = α/(2n̄). Below: n̄ = α/(γ − α) from the
    mean-field steady state and Δν′ = α/n̄, which equals γ − α.
    """
    if p.alpha == p.gamma:
        raise ValueError("linewidth formulas are singular at threshold alpha == gamma")
    natural = Regime.ABOVE if p.above_threshold else Regime.BELOW
    regime = natural if regime is None else Regime(regime)
    if regime is not natural:
        raise ValueError(f"parameters are {natural.value}, cannot evaluate {regime.value}")
    n_bar = p.n_bar if regime is Regime.ABOVE else p.below_threshold_n_bar()
    return Spectrum(center_frequency, schawlow_townes_fwhm(p.alpha, n_bar, regime), regime)


def below_threshold_mean_rate(p: LaserParams, n_bar: float) -> float:
    """dn̄/dt = α(n̄ + 1) − γn̄."""
    return p.alpha * (n_bar + 1.0) - p.gamma * n_bar


def below_threshold_field_rate(p: LaserParams) -> FieldRate:
    """dĒ/dt = ½(α − γ)Ē, also written −α/(2n̄) with n̄ = α/(γ − α).

    The mean-field steady state gives γ − α = α/n̄; the two forms must agree.
    """
    if p.alpha >= p.gamma:
        raise ValueError("field decay rate is defined below threshold only")
    rate = 0.5 * (p.alpha - p.gamma)
    via = -p.alpha / (2.0 * p.below_threshold_n_bar())
    if abs(rate - via) > 1e-12 * max(1.0, abs(rate)):
        raise NumericalError(f"field-rate identity broken: {rate!r} vs {via!r}")
    return FieldRate(rate, via)


def sampled_spectrum_fwhm(
    d_coefficient: float,
    frequency: float,
    periods_per_sample: float = 0.125,
    decay_lengths: float = 40.0,
    resolution: float = 1e-3,
) -> float:
    """FWHM of |FFT|² of exp(iνt − Dt) sampled on t ≥ 0.

    Samples ``periods_per_sample`` carrier periods apart until the envelope
    is exp(−decay_lengths), zero-pads until the frequency bin is at most
    ``resolution``·2D, and reads the half-maximum crossings by linear
    interpolation. Angular-frequency units, so the answer should be 2D.
    """
    if d_coefficient <= 0 or frequency <= 0:
        raise ValueError("D and frequency must be positive")
    dt = periods_per_sample * 2.0 * math.pi / frequency
    n = int(math.ceil(decay_lengths / (d_coefficient * dt)))
    t = np.arange(n) * dt
    x = np.exp((1j * frequency - d_coefficient) * t)
    n_pad = 1 << int(math.ceil(math.log2(max(n, 2.0 * math.pi / (dt * resolution * 2 * d_coefficient)))))
    power = np.abs(np.fft.fft(x, n_pad)) ** 2
    omega = 2.0 * math.pi * np.fft.fftfreq(n_pad, dt)
    order = np.argsort(omega)
    omega, power = omega[order], power[order]
    k = int(np.argmax(power))
    half = 0.5 * power[k]
    lo = k
    while power[lo] > half:
        lo -= 1
    hi = k
    while power[hi] > half:
        hi += 1

    def cross(i, j):
        return omega[i] + (half - power[i]) * (omega[j] - omega[i]) / (power[j] - power[i])

    return float(cross(hi - 1, hi) - cross(lo, lo + 1))
