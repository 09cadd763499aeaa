"""Closed-form spectrum of the spherical oscillator L_omega = Laplacian(S^d) + omega^2 r^2.

Eigenvalues are indexed by a radial index m and an angular degree n.  For
d >= 2 they take the form

    lambda_{m,n} = (m + X_n)^2 - omega^2 - (d - 1)^2 / 4,
    X_n = (sqrt((2n + d - 2)^2 + 16 omega^2) + d + 2n) / 4,

and the ground state (1 + r^2)^(-eta) has energy lambda_{0,0} = d * eta / 2.

For d = 1 the circle is cut open by the singular potential at the north pole
and the single index m runs over eigenfunctions of alternating parity:

    lambda_m = (m / 2 + (1 + sqrt(1 + 16 omega^2)) / 4)^2 - omega^2,   omega > 0,
    lambda_m = m^2 (multiplicity 2 for m > 0),                          omega = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

__all__ = [
    "ModelParams",
    "ModeIndex",
    "EigenvalueRecord",
    "GroundState",
    "DegeneracyGroup",
    "DEFAULT_GROUPING_TOL",
    "ground_state",
    "eigenvalue",
    "eigenvalue_shifted",
    "multiplicity",
    "angular_harmonic_dimension",
    "radial_offset",
    "enumerate_spectrum",
    "lowest_records",
    "group_degeneracies",
    "find_degenerate_omega",
]

DEFAULT_GROUPING_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    d: int
    omega: float

    def __post_init__(self) -> None:
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension d must be an integer >= 1, got {self.d!r}")
        if not math.isfinite(self.omega) or self.omega < 0:
            raise ValueError(f"omega must be finite and >= 0, got {self.omega!r}")


@dataclass(frozen=True, order=True)
class ModeIndex:
    m: int
    n: int = 0

    def __post_init__(self) -> None:
        if int(self.m) != self.m or int(self.n) != self.n or self.m < 0 or self.n < 0:
            raise ValueError(f"mode indices must be nonnegative integers, got ({self.m!r}, {self.n!r})")

    def __iter__(self):
        return iter((self.m, self.n))


@dataclass(frozen=True)
class EigenvalueRecord:
    mode: ModeIndex
    lam: float
    lam_shifted: float
    multiplicity: int


@dataclass(frozen=True)
class GroundState:
    """Ground state density (1 + r^2)^(-exponent) and its energy."""

    exponent: float
    energy: float


@dataclass(frozen=True)
class DegeneracyGroup:
    value: float
    members: tuple[ModeIndex, ...]
    total_multiplicity: int

    @property
    def degenerate(self) -> bool:
        return len(self.members) > 1


def _as_mode(mode) -> ModeIndex:
    return mode if isinstance(mode, ModeIndex) else ModeIndex(*mode)


def _check_mode(params: ModelParams, mode) -> ModeIndex:
    mode = _as_mode(mode)
    if params.d == 1 and mode.n != 0:
        raise ValueError(f"d=1 has no angular degree; got n={mode.n}")
    return mode


def ground_state(params: ModelParams) -> GroundState:
    d, w = params.d, params.omega
    if w == 0.0:
        # d <= 2 takes the negative root, d >= 2 the positive one; both give 0.
        return GroundState(0.0, 0.0)
    eta = (math.sqrt((d - 2) ** 2 + 16.0 * w * w) - (d - 2)) / 4.0
    return GroundState(eta, d * eta / 2.0)


def radial_offset(params: ModelParams, n: int) -> float:
    """X_n with lambda_{m,n} + omega^2 + (d-1)^2/4 = (m + X_n)^2, for d >= 2.

    For d = 1 with omega > 0 this is the offset c of lambda_m = (m/2 + c)^2 - omega^2.
    """
    d, w = params.d, params.omega
    if d == 1:
        return (1.0 + math.sqrt(1.0 + 16.0 * w * w)) / 4.0
    return (math.sqrt((2 * n + d - 2) ** 2 + 16.0 * w * w) + d + 2 * n) / 4.0


def _offset_gap(params: ModelParams, n: int) -> float:
    """X_n - X_0 without cancellation."""
    d, w = params.d, params.omega
    r0 = math.sqrt((d - 2) ** 2 + 16.0 * w * w)
    rn = math.sqrt((2 * n + d - 2) ** 2 + 16.0 * w * w)
    denom = rn + r0
    root_gap = 4.0 * n * (n + d - 2) / denom if denom > 0 else 0.0
    return (root_gap + 2 * n) / 4.0


def eigenvalue(params: ModelParams, mode) -> float:
    mode = _check_mode(params, mode)
    d, w = params.d, params.omega
    m, n = mode.m, mode.n
    if d == 1:
        if w == 0.0:
            return float(m * m)
        return (m / 2.0 + radial_offset(params, 0)) ** 2 - w * w
    return (m + radial_offset(params, n)) ** 2 - w * w - (d - 1) ** 2 / 4.0


def eigenvalue_shifted(params: ModelParams, mode) -> float:
    """Eigenvalue of L_omega minus its ground-state energy.

    Evaluated as a product of differences so that mode (0, 0) gives 0 exactly
    and small gaps keep full relative precision.
    """
    mode = _check_mode(params, mode)
    d, w = params.d, params.omega
    m, n = mode.m, mode.n
    if d == 1:
        if w == 0.0:
            return float(m * m)
        c = radial_offset(params, 0)
        return (m / 2.0) * (m / 2.0 + 2.0 * c)
    x0 = radial_offset(params, 0)
    xn = radial_offset(params, n)
    return (m + _offset_gap(params, n)) * (m + xn + x0)


def angular_harmonic_dimension(d: int, n: int) -> int:
    """Dimension of degree-n spherical harmonics on S^(d-1), for d >= 2."""
    if n == 0:
        return 1
    lower = math.comb(n + d - 3, n - 2) if n >= 2 else 0
    return math.comb(n + d - 1, n) - lower


def multiplicity(params: ModelParams, mode) -> int:
    mode = _check_mode(params, mode)
    if params.d == 1:
        # omega = 0 is the plain circle: cos(m phi) and sin(m phi).
        return 2 if params.omega == 0.0 and mode.m > 0 else 1
    return angular_harmonic_dimension(params.d, mode.n)


def _record(params: ModelParams, m: int, n: int) -> EigenvalueRecord:
    mode = ModeIndex(m, n)
    return EigenvalueRecord(
        mode=mode,
        lam=eigenvalue(params, mode),
        lam_shifted=eigenvalue_shifted(params, mode),
        multiplicity=multiplicity(params, mode),
    )


def enumerate_spectrum(params: ModelParams, lambda_max: float) -> list[EigenvalueRecord]:
    """All eigenvalue records with lambda <= lambda_max, ascending.

    lambda_{m,n} is strictly increasing in m and in n, so scanning n upward
    until lambda_{0,n} exceeds the cutoff (and m likewise) misses nothing.
    """
    if not math.isfinite(lambda_max):
        raise ValueError("lambda_max must be finite")
    e0 = eigenvalue(params, ModeIndex(0, 0))
    slack = 4.0 * 2.0**-52 * max(1.0, abs(lambda_max), abs(e0))
    if lambda_max < e0 - slack:
        raise ValueError(f"lambda_max={lambda_max} is below the ground-state eigenvalue {e0}")
    cutoff = lambda_max + slack

    records: list[EigenvalueRecord] = []
    n_values = [0] if params.d == 1 else range(0, 1 << 62)
    for n in n_values:
        if eigenvalue(params, ModeIndex(0, n)) > cutoff:
            break
        m = 0
        while True:
            rec = _record(params, m, n)
            if rec.lam > cutoff:
                break
            records.append(rec)
            m += 1
    records.sort(key=lambda r: (r.lam, r.mode.m, r.mode.n))
    return records


def lowest_records(params: ModelParams, count: int) -> list[EigenvalueRecord]:
    """The ``count`` lowest records (ties broken by mode index)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    e0 = eigenvalue(params, ModeIndex(0, 0))
    span = 1.0
    while True:
        records = enumerate_spectrum(params, e0 + span)
        if len(records) >= count:
            return records[:count]
        span *= 2.0


def group_degeneracies(
    records: Sequence[EigenvalueRecord], tol: float = DEFAULT_GROUPING_TOL
) -> list[DegeneracyGroup]:
    """Merge sorted records whose eigenvalues lie within ``tol`` of a group's first value."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    groups: list[DegeneracyGroup] = []
    members: list[EigenvalueRecord] = []

    def flush() -> None:
        if members:
            groups.append(
                DegeneracyGroup(
                    value=members[0].lam,
                    members=tuple(r.mode for r in members),
                    total_multiplicity=sum(r.multiplicity for r in members),
                )
            )

    for rec in records:
        if members and rec.lam - members[0].lam <= tol:
            members.append(rec)
            continue
        flush()
        members = [rec]
    flush()
    return groups


def find_degenerate_omega(
    d: int,
    mode1,
    mode2,
    omega_range: tuple[float, float],
    samples: int = 2000,
) -> Optional[float]:
    """Smallest omega in ``omega_range`` where the two modes share an eigenvalue.

    Scans the difference lambda_{mode1}(omega) - lambda_{mode2}(omega) on a
    uniform grid for a sign change, then bisects.  Returns None when the grid
    sees no sign change.
    """
    mode1, mode2 = _as_mode(mode1), _as_mode(mode2)
    if mode1 == mode2:
        raise ValueError("modes must differ")
    a, b = omega_range
    if not 0 <= a < b:
        raise ValueError(f"omega_range must satisfy 0 <= a < b, got {omega_range!r}")

    def diff(w: float) -> tuple[float, float]:
        p = ModelParams(d, w)
        l1 = eigenvalue(p, mode1)
        return l1 - eigenvalue(p, mode2), l1

    def converged(f: float, lam: float) -> bool:
        return abs(f) <= 1e-12 * max(1.0, abs(lam))

    grid = [a + (b - a) * i / samples for i in range(samples + 1)]
    lo, (f_lo, lam_lo) = grid[0], diff(grid[0])
    if f_lo == 0.0:
        return lo
    for hi in grid[1:]:
        f_hi, lam_hi = diff(hi)
        if f_hi == 0.0:
            return hi
        if (f_lo < 0) != (f_hi < 0):
            break
        lo, f_lo = hi, f_hi
    else:
        return None

    while True:
        mid = 0.5 * (lo + hi)
        f_mid, lam_mid = diff(mid)
        if converged(f_mid, lam_mid) or mid in (lo, hi):
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
