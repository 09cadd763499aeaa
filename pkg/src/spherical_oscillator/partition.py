"""Heat traces tr exp(-t L) for the shifted oscillator, with certified truncation.

Every eigenvalue of the shifted operator has the form (alpha*m + X)^2 - X0^2
with step alpha in {1/2, 1} and offsets X >= X0 > 0, so each m-series is a
Gaussian tail.  For u_m = alpha*m + X and K the first omitted index,

    u_m^2 >= u_K^2 + 2 alpha u_K (m - K),

which dominates the tail by a geometric series.  Across angular degrees the
n-blocks are dominated by mult(n) exp(-t (n + (d-1)/2)^2) and closed with a
ratio test; the ratio is nonincreasing in n so the first ratio bounds the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .spectrum import (
    ModelParams,
    _offset_gap,
    angular_harmonic_dimension,
    radial_offset,
)
from .special import bernoulli, sphere_volume

__all__ = [
    "BudgetExceeded",
    "TruncatedSum",
    "AsymptoticCoeffs",
    "MAX_TERMS",
    "partition_function",
    "poisson_dual_d1",
    "mulholland_coeffs",
    "mulholland_sum",
    "heat_trace_ratio",
    "heat_trace_leading_check",
    "fit_asymptotic_coeffs",
    "default_fit_grid",
]

MAX_TERMS = 10_000_000
_EPS = 2.0**-52


class BudgetExceeded(RuntimeError):
    """The requested tolerance needs more than MAX_TERMS terms."""


@dataclass(frozen=True)
class TruncatedSum:
    """A truncated positive series with a bound on |value - exact sum|.

    ``tail_bound`` covers the omitted terms plus an a-posteriori allowance for
    floating-point evaluation of the kept ones.
    """

    value: float
    tail_bound: float
    terms_used: int
    t: float


@dataclass(frozen=True)
class AsymptoticCoeffs:
    coefficients: tuple
    order: int
    condition_number: Optional[float] = None

    @property
    def ill_conditioned(self) -> bool:
        return self.condition_number is not None and self.condition_number > 1e10


class _Accumulator:
    """Collects term arrays; summed once with fsum so the order never matters."""

    def __init__(self) -> None:
        self.chunks: list[np.ndarray] = []
        self.err_weight = 0.0
        self.truncation = 0.0
        self.count = 0

    def add(self, terms: np.ndarray, exponents: np.ndarray, weight: float) -> None:
        self.chunks.append(weight * terms)
        # exp(-y) with y carrying relative error ~eps*(1 + y): term error ~ eps*(2 + y)*term
        self.err_weight += weight * math.fsum(terms * (2.0 + exponents))
        self.count += terms.size
        if self.count > MAX_TERMS:
            raise BudgetExceeded(f"more than {MAX_TERMS} terms needed")

    def result(self, t: float) -> TruncatedSum:
        value = math.fsum(np.concatenate(self.chunks)) if self.chunks else 0.0
        rounding = 4.0 * _EPS * self.err_weight + math.ulp(value)
        return TruncatedSum(value, self.truncation + rounding, self.count, t)


def _gauss_tail(t: float, u: float, excess: float, x0: float, step: float) -> float:
    """Bound on sum_{j>=0} exp(-t((u + step*j)^2 - x0^2)); ``excess`` = u - x0 >= 0."""
    if u <= 0:
        return math.inf
    return math.exp(-t * excess * (excess + 2.0 * x0)) / -math.expm1(-2.0 * step * t * u)


def _gauss_block(
    acc: _Accumulator,
    t: float,
    x: float,
    x0: float,
    gap: float,
    step: float,
    weight: float,
    eps: float,
    shifted_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> None:
    """Add weight * sum_m exp(-t((step*m + x)^2 - x0^2)) truncated to an eps tail.

    ``gap`` = x - x0, passed separately to avoid cancellation in the exponent.
    """
    # smallest K with the tail bound at u_K below eps
    need = x0 * x0 + math.log(max(weight, 1.0) / eps) / t
    u_target = math.sqrt(max(need, 0.0))
    K = max(0, math.ceil((u_target - x) / step))

    def tail(K: int) -> float:
        return weight * _gauss_tail(t, step * K + x, step * K + gap, x0, step)

    while tail(K) > eps:
        K += max(1, K // 8)
    if K > MAX_TERMS:
        raise BudgetExceeded(f"m-series needs {K} terms at t={t}")
    if K:
        m = np.arange(K, dtype=float)
        if shifted_fn is None:
            a = step * m + gap
            exponents = t * a * (a + 2.0 * x0)
        else:
            exponents = t * shifted_fn(m)
        acc.add(np.exp(-exponents), exponents, weight)
    acc.truncation += tail(K)


def partition_function(
    params: ModelParams,
    t: float,
    abs_tol: float = 1e-12,
    shifted_fn: Optional[Callable[[np.ndarray, int], np.ndarray]] = None,
) -> TruncatedSum:
    """tr exp(-t L_shifted) = sum over modes of mult * exp(-t * shifted eigenvalue).

    ``shifted_fn(m, n)``, when given, supplies the kept terms' shifted
    eigenvalues for d >= 2 in place of the built-in product form; it must
    agree with it, since the truncation bounds are derived from that form.
    """
    if not t > 0 or not math.isfinite(t):
        raise ValueError(f"t must be positive and finite, got {t!r}")
    if not abs_tol > 0:
        raise ValueError("abs_tol must be positive")
    d, w = params.d, params.omega
    acc = _Accumulator()
    half = 0.5 * abs_tol

    if d == 1:
        if w == 0.0:
            # 1 + 2 sum_{j>=1} exp(-t j^2)
            acc.add(np.ones(1), np.zeros(1), 1.0)
            _gauss_block(acc, t, 1.0, 0.0, 1.0, 1.0, 2.0, half)
        else:
            c = radial_offset(params, 0)
            _gauss_block(acc, t, c, c, 0.0, 0.5, 1.0, half)
        res = acc.result(t)
        _check_tol(res, abs_tol)
        return res

    x0 = radial_offset(params, 0)
    n = 0
    while True:
        mult = angular_harmonic_dimension(d, n)
        eps_n = half / (2.0 * (n + 1) ** 2)
        fn = None if shifted_fn is None else (lambda m, n=n: shifted_fn(m, n))
        _gauss_block(acc, t, radial_offset(params, n), x0, _offset_gap(params, n), 1.0, mult, eps_n, fn)
        n += 1
        if n > MAX_TERMS:
            raise BudgetExceeded(f"angular series needs more than {MAX_TERMS} blocks at t={t}")
        bound = _angular_tail(params, t, n, x0)
        if bound <= half:
            acc.truncation += bound
            break
    res = acc.result(t)
    _check_tol(res, abs_tol)
    return res


def _angular_tail(params: ModelParams, t: float, n_first: int, x0: float) -> float:
    """Bound on all n-blocks with n >= n_first (each block summed over every m)."""
    d = params.d
    y = n_first + (d - 1) / 2.0  # X_n >= n + (d-1)/2
    if y <= 0:
        return math.inf
    # per-block: mult(n) exp(-t(y_n^2 - x0^2)) / (1 - exp(-2 t y_n)), last factor nonincreasing
    block_factor = 1.0 / -math.expm1(-2.0 * t * y)
    m1 = angular_harmonic_dimension(d, n_first)
    m2 = angular_harmonic_dimension(d, n_first + 1)
    ratio = (m2 / m1) * math.exp(-t * (2.0 * y + 1.0))
    if n_first < 1 or ratio >= 1.0:
        return math.inf
    lead = t * (y * y - x0 * x0)
    if lead < -700:
        return math.inf
    return m1 * math.exp(-lead) * block_factor / (1.0 - ratio)


def _check_tol(res: TruncatedSum, abs_tol: float) -> None:
    if res.tail_bound > abs_tol:
        raise ValueError(
            f"abs_tol={abs_tol:g} is below the rounding floor of this sum "
            f"(bound {res.tail_bound:g} for value {res.value:g})"
        )


def poisson_dual_d1(t: float) -> float:
    """sqrt(pi/t) * (1 + 2 sum_{n>=1} exp(-pi^2 n^2 / t)), the theta-inverted circle trace."""
    if not t > 0:
        raise ValueError("t must be positive")
    terms = [1.0]
    k = 1
    while True:
        term = 2.0 * math.exp(-math.pi**2 * k * k / t)
        if term < 1e-18:
            break
        terms.append(term)
        k += 1
    return math.sqrt(math.pi / t) * math.fsum(terms)


def mulholland_coeffs(order: int) -> AsymptoticCoeffs:
    """a_0 .. a_order in sum (2n+1) exp(-t (n + 1/2)^2) ~ 1/t + a_0 + a_1 t + ...

    a_n = (-1)^n B_{2n+2} (1 - 2^{-2n-1}) / ((n+1) n!), from the zeta values
    sum (n+1/2)^{-s} = (2^s - 1) zeta(s) at s = -2n-1.
    """
    if int(order) != order or not 0 <= order <= 20:
        raise ValueError(f"order must be an integer in [0, 20], got {order!r}")
    coeffs = tuple(
        Fraction((-1) ** n, (n + 1) * math.factorial(n))
        * bernoulli(2 * n + 2)
        * (1 - Fraction(1, 2 ** (2 * n + 1)))
        for n in range(order + 1)
    )
    return AsymptoticCoeffs(coeffs, order)


def mulholland_sum(t: float, abs_tol: float = 1e-13) -> TruncatedSum:
    """sum_{n>=0} (2n+1) exp(-t (n + 1/2)^2) with a certified tail."""
    if not t > 0:
        raise ValueError("t must be positive")
    # (2n+1) e^{-t u^2} with u = n + 1/2: terms 2u e^{-t u^2}, nonincreasing once 2 t u^2 >= 1
    n_min = max(0, math.ceil(math.sqrt(1.0 / (2.0 * t)) - 0.5))
    N = max(n_min, math.ceil(math.sqrt(math.log(1.0 / abs_tol) / t)))
    while True:
        u = N + 0.5
        # 2u e^{-tu^2} decreases by at least r per step beyond N
        r = (1.0 + 1.0 / u) * math.exp(-t * (2.0 * u + 1.0))
        bound = 2.0 * u * math.exp(-t * u * u) / (1.0 - r) if r < 1 else math.inf
        if bound <= abs_tol / 2:
            break
        N += max(1, N // 8)
    if N > MAX_TERMS:
        raise BudgetExceeded(f"{N} terms needed at t={t}")
    u = np.arange(N, dtype=float) + 0.5
    terms = 2.0 * u * np.exp(-t * u * u)
    value = math.fsum(terms)
    rounding = 4.0 * _EPS * math.fsum(terms * (2.0 + t * u * u)) + math.ulp(value)
    return TruncatedSum(value, bound + rounding, N, t)


def heat_trace_ratio(params: ModelParams, t: float, abs_tol: Optional[float] = None) -> float:
    """partition_function * (4 pi t)^(d/2) / vol(S^d)."""
    d = params.d
    scale = (4.0 * math.pi * t) ** (d / 2.0) / sphere_volume(d)
    tol = abs_tol if abs_tol is not None else 1e-13 / scale
    return partition_function(params, t, tol).value * scale


def heat_trace_leading_check(params: ModelParams, t_grid: Sequence[float]) -> list[float]:
    for t in t_grid:
        if not t > 0:
            raise ValueError(f"t values must be positive, got {t!r}")
    return [heat_trace_ratio(params, t) for t in t_grid]


def default_fit_grid(order: int) -> list[float]:
    return [0.4 * 2.0**-j for j in range(order + 4)]


def fit_asymptotic_coeffs(
    params: ModelParams, order: int, t_grid: Optional[Sequence[float]] = None
) -> AsymptoticCoeffs:
    """Least-squares fit of the normalized heat trace to a polynomial in t.

    The result carries the condition number of the Vandermonde system; above
    1e10 the ``ill_conditioned`` flag is set and a RuntimeWarning is issued.
    """
    import warnings

    if order < 0:
        raise ValueError("order must be >= 0")
    grid = list(t_grid) if t_grid is not None else default_fit_grid(order)
    if len(grid) < order + 3:
        raise ValueError(f"need at least {order + 3} t values, got {len(grid)}")
    ts = np.asarray(grid, dtype=float)
    ratios = np.asarray(heat_trace_leading_check(params, ts))
    V = np.vander(ts, order + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(V, ratios, rcond=None)
    cond = float(np.linalg.cond(V))
    result = AsymptoticCoeffs(tuple(float(c) for c in coeffs), order, cond)
    if result.ill_conditioned:
        warnings.warn(f"ill-conditioned asymptotic fit (cond={cond:.3g})", RuntimeWarning, stacklevel=2)
    return result
