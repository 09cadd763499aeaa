"""Special-function substrate: terminating 2F1, Bernoulli numbers, eta, sphere volumes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "HypergeometricParams",
    "hyp2f1_coefficients",
    "hyp2f1_terminating",
    "bernoulli",
    "dedekind_eta_from_q",
    "sphere_volume",
]

# Product factors closer to 1 than this are dropped.
ETA_FACTOR_CUTOFF = 1e-17
ETA_MAX_FACTORS = 10_000_000


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


@dataclass(frozen=True)
class HypergeometricParams:
    """Parameters of a terminating Gauss series 2F1(a, b; c; z).

    ``termination_order`` is the M with a == -M or b == -M.  The constructor
    rejects anything that would not terminate, and any c that hits a zero
    denominator inside the sum.
    """

    a: float
    b: float
    c: float
    termination_order: int

    def __post_init__(self) -> None:
        M = self.termination_order
        if M < 0 or int(M) != M:
            raise ValueError(f"termination_order must be a nonnegative integer, got {M!r}")
        if self.a != -M and self.b != -M:
            raise ValueError(
                f"non-terminating parameters: neither a={self.a} nor b={self.b} equals -{M}"
            )
        if _is_nonpositive_integer(self.c) and self.c >= -(M - 1):
            raise ValueError(f"c={self.c} produces a zero denominator before order {M}")

    @classmethod
    def from_abc(cls, a: float, b: float, c: float) -> "HypergeometricParams":
        """Infer the termination order from whichever of a, b is a nonpositive integer.

        When both are, the series stops at the smaller order.
        """
        orders = [int(-x) for x in (a, b) if _is_nonpositive_integer(x)]
        if not orders:
            raise ValueError(f"2F1({a}, {b}; {c}; z) does not terminate")
        return cls(a, b, c, min(orders))


def hyp2f1_coefficients(p: HypergeometricParams) -> list[float]:
    """Coefficients of 2F1(a, b; c; z) as a polynomial in z, lowest degree first."""
    coeffs = [1.0]
    term = 1.0
    for l in range(p.termination_order):
        term *= (p.a + l) * (p.b + l) / ((p.c + l) * (l + 1))
        coeffs.append(term)
    return coeffs


def hyp2f1_terminating(p: HypergeometricParams, z: float) -> float:
    """Evaluate the terminating series sum_{l<=M} (a)_l (b)_l / ((c)_l l!) z^l."""
    total = 0.0
    for coeff in reversed(hyp2f1_coefficients(p)):
        total = total * z + coeff
    return total


@lru_cache(maxsize=None)
def _bernoulli_table(kmax: int) -> tuple[Fraction, ...]:
    # sum_{j=0}^{k} C(k+1, j) B_j = 0 with B_0 = 1 (B_1 = -1/2 convention;
    # even-index values do not depend on it).
    B = [Fraction(1)]
    for k in range(1, kmax + 1):
        s = sum((math.comb(k + 1, j) * B[j] for j in range(k)), Fraction(0))
        B.append(-s / (k + 1))
    return tuple(B)


def bernoulli(k: int) -> Fraction:
    """Exact Bernoulli number B_k for even k in [2, 64].

    >>> bernoulli(2), bernoulli(4)
    (Fraction(1, 6), Fraction(-1, 30))
    """
    if int(k) != k or k % 2 or not 2 <= k <= 64:
        raise ValueError(f"bernoulli(k) needs an even k with 2 <= k <= 64, got {k!r}")
    return _bernoulli_table(64)[k]


def dedekind_eta_from_q(q: float) -> float:
    """Dedekind eta as a function of the nome: q^(1/24) * prod_{n>=1} (1 - q^n).

    The product stops at the first n with q^n < 1e-17, so the truncation
    point depends only on q.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"nome q must lie in (0, 1), got {q!r}")
    log_q = math.log(q)
    n_stop = math.ceil(math.log(ETA_FACTOR_CUTOFF) / log_q)
    if n_stop > ETA_MAX_FACTORS:
        raise ValueError(f"q={q!r} too close to 1: {n_stop} factors needed")
    logs = [math.log1p(-math.exp(n * log_q)) for n in range(1, n_stop)]
    return math.exp(log_q / 24.0 + math.fsum(logs))


def sphere_volume(d: int) -> float:
    """Surface volume of the unit d-sphere S^d in R^(d+1)."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d!r}")
    return 2.0 * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)
