"""Special functions shared by the distribution and entropy code.

Everything that touches a factorial is evaluated in the log domain so that
occupations of order 10**6 do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SERIES_TOL = 1e-12
SERIES_TERM_CAP = 10_000_000

_EXACT_FACTORIAL_MAX = 20


@dataclass(frozen=True)
class SeriesResult:
    """Outcome of a summed series.

    ``value`` holds the natural log of the sum when ``log_domain`` is set.
    """

    value: float
    terms_used: int
    converged: bool
    log_domain: bool = True

    def linear(self) -> float:
        """The sum itself (may overflow to ``inf`` for huge arguments)."""
        if not self.log_domain:
            return self.value
        try:
            return math.exp(self.value)
        except OverflowError:
            return math.inf


def log_gamma(x: float) -> float:
    if x <= 0:
        raise ValueError(f"log_gamma needs a positive argument, got {x}")
    return math.lgamma(x)


def log_factorial(n: int) -> float:
    """ln(n!); exact product up to 20!, log-gamma beyond."""
    if n < 0:
        raise ValueError(f"log_factorial needs n >= 0, got {n}")
    if n <= _EXACT_FACTORIAL_MAX:
        return math.log(math.factorial(int(n)))
    return math.lgamma(n + 1.0)


def log_factorial_real(x: float) -> float:
    """ln Γ(x + 1), the factorial continued to real x > -1."""
    if x <= -1:
        raise ValueError(f"factorial undefined for x = {x}")
    if float(x).is_integer() and x <= _EXACT_FACTORIAL_MAX:
        return log_factorial(int(x))
    return math.lgamma(x + 1.0)


def stirling_log_factorial(n: float) -> float:
    """Leading Stirling form ln√(2πn) + n ln n − n."""
    if n <= 0:
        raise ValueError(f"Stirling's formula needs n > 0, got {n}")
    return 0.5 * math.log(2.0 * math.pi * n) + n * math.log(n) - n


_lgamma_vec = np.frompyfunc(math.lgamma, 1, 1)


def _lgamma_array(x: np.ndarray) -> np.ndarray:
    return _lgamma_vec(x).astype(float)


def _logsumexp(values: np.ndarray) -> float:
    m = float(values.max())
    return m + math.log(float(np.exp(values - m).sum()))


def hypergeometric_1f1_1(
    b: float,
    a: float,
    tol: float = SERIES_TOL,
    max_terms: int = SERIES_TERM_CAP,
) -> SeriesResult:
    """Log of ₁F₁(1; b; a) = Σ_k a^k / (b)_k, summed term by term.

    Each term is formed directly from log-gamma, so no error accumulates
    along the series. Summation stops once the geometric bound on the
    remaining tail, relative to the running sum, drops below ``tol``.
    A sum that is still growing when ``max_terms`` is reached comes back
    with ``converged=False``.
    """
    if b <= 0:
        raise ValueError(f"b must be positive, got {b}")
    if a < 0:
        raise ValueError(f"a must be nonnegative, got {a}")
    if a == 0:
        return SeriesResult(0.0, 1, True)

    log_a = math.log(a)
    lg_b = math.lgamma(b)
    log_tol = math.log(tol)
    # running log-sum-exp state: total = exp(acc_max) * acc_scaled
    acc_max = -math.inf
    acc_scaled = 0.0
    start = 0
    chunk = 4096
    while start < max_terms:
        stop = min(start + chunk, max_terms)
        k = np.arange(start, stop, dtype=float)
        log_terms = k * log_a - (_lgamma_array(b + k) - lg_b)

        chunk_max = float(log_terms.max())
        if chunk_max > acc_max:
            acc_scaled *= math.exp(acc_max - chunk_max) if acc_max > -math.inf else 0.0
            acc_max = chunk_max
        acc_scaled += float(np.exp(log_terms - acc_max).sum())
        log_sum = acc_max + math.log(acc_scaled)

        last = stop - 1
        ratio = a / (b + last + 1)
        if ratio < 1.0:
            # in logs: ratio underflows to 0 for subnormal a
            log_tail = float(log_terms[-1]) + log_a - math.log(b + last + 1) - math.log1p(-ratio)
            if log_tail - log_sum < log_tol:
                return SeriesResult(log_sum, stop, True)
        start = stop
        chunk *= 2
    return SeriesResult(acc_max + math.log(acc_scaled), max_terms, False)


def log_hypergeometric_asymptotic(b_shift: float, a: float) -> float:
    """Large-``a`` form of ln ₁F₁(1; B+1; A): ln(B!) + A − B ln A.

    ``b_shift`` is B (the first-parameter-shifted value), not B + 1.
    """
    if a <= 0:
        raise ValueError("asymptotic form needs a > 0")
    return log_factorial_real(b_shift) + a - b_shift * math.log(a)
