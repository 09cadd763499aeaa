"""Closed-form radial eigenfunctions and their checks.

For d >= 2 the radial profile of mode (m, n) is

    g(r) = r^n (1 + r^2)^(-s) P(-r^2),

with P = 2F1(-m - R/2, -m; n + d/2; z), R = sqrt((2n + d - 2)^2 + 16 omega^2),
and s = (sqrt((d-1)^2 + 4 omega^2 + 4 lambda) - (d - 1)) / 2.  Profiles are
kept unnormalized (P(0) = 1); the weighted L^2 norm is stored alongside.
The measure is (1 + r^2)^(-d) r^(d-1) dr on (0, inf).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .special import HypergeometricParams, hyp2f1_coefficients
from .spectrum import ModeIndex, ModelParams, _check_mode, eigenvalue

__all__ = [
    "IntegrabilityError",
    "RadialEigenfunction",
    "build_eigenfunction",
    "ode_residual",
    "l2_norm",
    "inner_product",
    "rayleigh_quotient",
    "DEFAULT_R_GRID",
]

DEFAULT_R_GRID = tuple(np.linspace(0.1, 10.0, 100))
_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-12, limit=200)


class IntegrabilityError(ValueError):
    """Raised when a profile is not square integrable under the sphere weight."""


@dataclass(frozen=True)
class RadialEigenfunction:
    params: ModelParams
    mode: ModeIndex
    lam: float
    decay_exponent: float
    poly_coeffs: tuple[float, ...]
    normalization: float = field(default=math.nan, compare=False)

    @property
    def degree(self) -> int:
        return len(self.poly_coeffs) - 1

    def integrable(self) -> bool:
        """Strict form of 2n + 4m + d - 2 < 2 sqrt((d-1)^2 + 4 omega^2 + 4 lambda)."""
        return self._far_exponent() > -1.0

    def _far_exponent(self) -> float:
        # integrand ~ u^e near u = 1/r = 0
        d, n = self.params.d, self.mode.n
        return 2.0 * (2.0 * self.decay_exponent - n - 2 * self.degree) + d - 1

    def __call__(self, r):
        return self.derivatives(r)[0]

    def derivatives(self, r):
        """g, g', g'' at r > 0, by the product rule on r^n (1+r^2)^(-s) P(-r^2)."""
        r = np.asarray(r, dtype=float)
        n, s = self.mode.n, self.decay_exponent
        c = np.asarray(self.poly_coeffs)
        l = np.arange(len(c))
        signed = c * (-1.0) ** l
        r2 = r * r
        one = 1.0 + r2

        # P(-r^2) and its r-derivatives
        P = np.polyval(signed[::-1], r2)
        dP_coeffs = (2 * l * signed)[1:]
        P1 = r * np.polyval(dP_coeffs[::-1], r2) if len(dP_coeffs) else np.zeros_like(r)
        d2 = (2 * l * (2 * l - 1) * signed)[1:]
        P2 = np.polyval(d2[::-1], r2) if len(d2) else np.zeros_like(r)

        A = r**n
        A1 = n * r ** (n - 1) if n else np.zeros_like(r)
        A2 = n * (n - 1) * r ** (n - 2) if n > 1 else np.zeros_like(r)
        B = one ** (-s)
        B1 = -2.0 * s * r * one ** (-s - 1)
        B2 = -2.0 * s * one ** (-s - 1) + 4.0 * s * (s + 1) * r2 * one ** (-s - 2)

        g = A * B * P
        g1 = A1 * B * P + A * B1 * P + A * B * P1
        g2 = (
            A2 * B * P + A * B2 * P + A * B * P2
            + 2.0 * (A1 * B1 * P + A1 * B * P1 + A * B1 * P1)
        )
        return g, g1, g2

    def near_field(self, r):
        """h(r) with g(r)^2 w(r) = r^(2n+d-1) h(r)^2, finite at r = 0."""
        r = np.asarray(r, dtype=float)
        d, s = self.params.d, self.decay_exponent
        c = np.asarray(self.poly_coeffs)
        signed = c * (-1.0) ** np.arange(len(c))
        return (1.0 + r * r) ** (-s - d / 2.0) * np.polyval(signed[::-1], r * r)

    def far_field(self, u):
        """h(u) with g(1/u)^2 w(1/u) / u^2 = u^e h(u)^2, e the far exponent.

        This is the (1, inf) half of every weighted integral after r = 1/u.
        """
        u = np.asarray(u, dtype=float)
        d, s = self.params.d, self.decay_exponent
        c = np.asarray(self.poly_coeffs)
        m = self.degree
        l = np.arange(m + 1)
        # Q(u) = u^(2m) P(-1/u^2), coefficient of u^(2(m-l)) is c_l (-1)^l
        q = np.polyval((c * (-1.0) ** l), u * u)
        return (1.0 + u * u) ** (-s - d / 2.0) * q


def _weight(d: int, r):
    return r ** (d - 1) * (1.0 + r * r) ** (-d)


def build_eigenfunction(params: ModelParams, mode) -> RadialEigenfunction:
    mode = _check_mode(params, mode)
    if params.d == 1:
        raise ValueError("radial eigenfunctions are only built for d >= 2")
    d, w = params.d, params.omega
    m, n = mode.m, mode.n
    lam = eigenvalue(params, mode)
    big_root = math.sqrt((2 * n + d - 2) ** 2 + 16.0 * w * w)
    # the b = -m branch; a = b - R/2
    hp = HypergeometricParams(a=-m - big_root / 2.0, b=-m, c=n + d / 2.0, termination_order=m)
    coeffs = tuple(hyp2f1_coefficients(hp))
    s = (math.sqrt((d - 1) ** 2 + 4.0 * w * w + 4.0 * lam) - (d - 1)) / 2.0
    f = RadialEigenfunction(params, mode, lam, s, coeffs)
    return RadialEigenfunction(params, mode, lam, s, coeffs, normalization=l2_norm(f))


def ode_residual(f: RadialEigenfunction, r_grid: Sequence[float] = DEFAULT_R_GRID) -> float:
    """Sup over the grid of |radial ODE residual| / (1 + |lambda g(r)|)."""
    r = np.asarray(r_grid, dtype=float)
    if r.size == 0:
        raise ValueError("empty r grid")
    if np.any(r <= 0) or not np.all(np.isfinite(r)):
        raise ValueError("r grid must lie in (0, inf)")
    d, w, n, lam = f.params.d, f.params.omega, f.mode.n, f.lam
    g, g1, g2 = f.derivatives(r)
    r2 = r * r
    one = 1.0 + r2
    drift = 1.0 + (d - 2) * (1.0 - r2) / one
    lhs = r2 * g2 + drift * r * g1 + (-n * (n + d - 2) + 4.0 * (lam * r2 - w * w * r2 * r2) / one**2) * g
    return float(np.max(np.abs(lhs) / (1.0 + np.abs(lam * g))))


def _split_integral(near: Callable, far: Callable, a_near: float, a_far: float, epsabs: float = 0.0) -> float:
    """int_0^1 x^a_near near(x) dx + int_0^1 u^a_far far(u) du with algebraic weights."""
    opts = dict(_QUAD_OPTS, epsabs=epsabs)
    left, _ = integrate.quad(near, 0.0, 1.0, weight="alg", wvar=(a_near, 0.0), **opts)
    right, _ = integrate.quad(far, 0.0, 1.0, weight="alg", wvar=(a_far, 0.0), **opts)
    return left + right


def inner_product(f1: RadialEigenfunction, f2: RadialEigenfunction) -> float:
    """int_0^inf g1 g2 (1 + r^2)^(-d) r^(d-1) dr for two profiles of the same d."""
    if f1.params.d != f2.params.d:
        raise ValueError("profiles must share the dimension")
    for f in (f1, f2):
        if not f.integrable():
            raise IntegrabilityError(f"mode {tuple(f.mode)} is not square integrable")
    d = f1.params.d
    n1, n2 = f1.mode.n, f2.mode.n
    # near-orthogonal pairs cannot meet a relative tolerance; scale by the norms
    epsabs = 0.0 if f1 is f2 else 1e-14 * _norm_of(f1) * _norm_of(f2)
    a_near = 0.5 * (2 * n1 + d - 1) + 0.5 * (2 * n2 + d - 1)
    a_far = 0.5 * (f1._far_exponent() + f2._far_exponent())
    return _split_integral(
        lambda r: f1.near_field(r) * f2.near_field(r),
        lambda u: f1.far_field(u) * f2.far_field(u),
        a_near,
        a_far,
        epsabs,
    )


def _norm_of(f: RadialEigenfunction) -> float:
    return f.normalization if math.isfinite(f.normalization) else l2_norm(f)


def l2_norm(f: RadialEigenfunction) -> float:
    """Weighted L^2 norm; raises IntegrabilityError instead of returning a bogus value."""
    if not f.integrable():
        raise IntegrabilityError(
            f"mode {tuple(f.mode)} fails 2n + 4m + d - 2 < 2 sqrt((d-1)^2 + 4 w^2 + 4 lam)"
        )
    return math.sqrt(inner_product(f, f))


def rayleigh_quotient(f: RadialEigenfunction) -> float:
    """Quadratic form of L_omega on g f(theta), divided by the squared norm.

    The angular factor contributes n(n+d-2)/r^2 through the round metric.
    """
    d, w, n = f.params.d, f.params.omega, f.mode.n
    ang = n * (n + d - 2)

    def integrand(r):
        g, g1, _ = f.derivatives(r)
        kinetic = 0.25 * (1.0 + r * r) ** 2 * (g1 * g1 + ang * g * g / (r * r))
        return (kinetic + w * w * r * r * g * g) * _weight(d, r)

    lo, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-10, limit=200)
    hi, _ = integrate.quad(integrand, 1.0, np.inf, epsabs=0.0, epsrel=1e-10, limit=200)
    return (lo + hi) / _norm_of(f) ** 2
