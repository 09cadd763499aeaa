"""Conjectural principal-chiral-model partition function built from d=2 oscillators.

    Z(t) = (e^t prod_{k>=1} sum_{m,n} mult(n) e^{-t (lambda_{k,m,n} - 2k)})^2 / eta(e^{-4t})^2

with lambda_{k,m,n} = m^2 + m + m(n + Q) + (n+1)(n + Q)/2 - 2k, Q = sqrt(n^2 + 16k^2).
Read literally, the exponent subtracts 2k twice and every level factor grows
like e^{2kt}, so the product diverges.  ``exponent_mode="shifted"`` drops the
second subtraction, which makes each level factor the d=2, omega=2k heat trace.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .partition import partition_function
from .special import dedekind_eta_from_q
from .spectrum import ModelParams

__all__ = [
    "EXPONENT_MODES",
    "ChiralConvergenceWarning",
    "ChiralPartition",
    "lambda_kmn",
    "level_factor",
    "chiral_partition",
]

EXPONENT_MODES = ("verbatim", "shifted")


class ChiralConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class ChiralPartition:
    value: float
    rel_error_bound: float
    level_diagnostic: float  # |F_{k_max} - 1|
    converged: bool
    t: float
    k_max: int
    exponent_mode: str
    level_factors: tuple[float, ...]
    eta: float
    terms_used: int


def lambda_kmn(k: int, m: int, n: int) -> float:
    q = math.sqrt(n * n + 16.0 * k * k)
    return m * m + m + m * (n + q) + (n + 1) * (n + q) / 2.0 - 2.0 * k


def level_factor(k: int, t: float, abs_tol: float, exponent_mode: str = "verbatim"):
    """Level-k sum sum_{m,n} mult(n) e^{-t (lambda_{k,m,n} - 2k)} and its error bound.

    Terms come from ``lambda_kmn`` as written; truncation bounds come from the
    d=2, omega=2k trace, whose shifted eigenvalues lambda_{k,m,n} equals.  The
    verbatim exponent's extra -2k is the constant factor e^{2kt}, which leaves
    the relative error of the level sum unchanged.
    """
    if exponent_mode not in EXPONENT_MODES:
        raise ValueError(f"exponent_mode must be one of {EXPONENT_MODES}, got {exponent_mode!r}")
    if k < 1:
        raise ValueError("level k must be >= 1")
    scale = math.exp(2.0 * k * t) if exponent_mode == "verbatim" else 1.0
    res = partition_function(
        ModelParams(2, 2.0 * k), t, abs_tol, shifted_fn=lambda m, n: lambda_kmn(k, m, n)
    )
    return res.value * scale, res.tail_bound * scale, res.terms_used


def chiral_partition(
    t: float, k_max: int, abs_tol: float = 1e-12, exponent_mode: str = "verbatim"
) -> ChiralPartition:
    """Truncate the level product at k_max and report how far the last factor is from 1.

    ``converged`` is False (and a ChiralConvergenceWarning is raised) when
    |F_{k_max} - 1| exceeds ``abs_tol``.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    factors = []
    log_sum = []
    rel = 0.0
    terms = 0
    for k in range(1, k_max + 1):
        value, bound, used = level_factor(k, t, abs_tol, exponent_mode)
        factors.append(value)
        log_sum.append(math.log(value))
        rel += bound / value
        terms += used
    eta = dedekind_eta_from_q(math.exp(-4.0 * t))
    log_z = 2.0 * (t + math.fsum(log_sum)) - 2.0 * math.log(eta)
    value = math.exp(log_z) if log_z < 709 else math.inf
    # product of (1 + r_k) squared; eta from a fixed-length product is good to a few ulps
    rel_bound = (1.0 + rel) ** 2 - 1.0 + 16 * 2.0**-52 * (k_max + 4)
    diag = abs(factors[-1] - 1.0)
    converged = diag <= abs_tol
    if not converged:
        warnings.warn(
            f"level product not converged at k_max={k_max}: |F_k_max - 1| = {diag:.3g}",
            ChiralConvergenceWarning,
            stacklevel=2,
        )
    return ChiralPartition(
        value=value,
        rel_error_bound=rel_bound,
        level_diagnostic=diag,
        converged=converged,
        t=t,
        k_max=k_max,
        exponent_mode=exponent_mode,
        level_factors=tuple(factors),
        eta=eta,
        terms_used=terms,
    )
