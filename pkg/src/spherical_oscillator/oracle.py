"""Finite-volume discretization of the radial problem, independent of the closed forms.

With r = tan(phi/2) the radial equation for angular degree n becomes the
Sturm-Liouville problem on phi in (0, pi)

    -(p g')' + q g = lambda w g,
    p = w = sin^(d-1) phi,
    q = [n(n+d-2) / sin^2 phi + omega^2 tan^2(phi/2)] sin^(d-1) phi.

Cells are centred on a uniform grid; cell weights are integrated exactly
enough (4-point Gauss-Legendre) that the degenerate weight at phi = 0 is
handled by the half cell.  The generalized problem is symmetrized by the
diagonal weight and its lowest eigenvalues come from LAPACK's Sturm-count
bisection (stebz), which is deterministic.

For d = 1 the circle is treated on the full line phi in (-pi, pi); with
omega = 0 nothing singular cuts it open and the periodic problem is split into
its even (Neumann/Neumann) and odd (Dirichlet/Dirichlet) halves on (0, pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .spectrum import ModelParams

__all__ = [
    "DiscretizationConfig",
    "TridiagonalBlock",
    "RadialProblem",
    "OracleSpectrum",
    "assemble_radial_problem",
    "block_eigenvalues",
    "lowest_eigenvalues",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)


@dataclass(frozen=True)
class DiscretizationConfig:
    grid_size: int
    angular_degree: int
    params: ModelParams
    domain_map: str = "tangent_half_angle"
    pi_boundary: Optional[str] = None  # None picks dirichlet for omega > 0, neumann for omega = 0

    def __post_init__(self) -> None:
        if self.grid_size < 100:
            raise ValueError(f"grid_size must be >= 100, got {self.grid_size}")
        if self.domain_map != "tangent_half_angle":
            raise ValueError(f"unknown domain map {self.domain_map!r}")
        if self.angular_degree < 0:
            raise ValueError("angular degree must be >= 0")
        if self.params.d == 1 and self.angular_degree != 0:
            raise ValueError("d=1 has no angular degree")
        if self.pi_boundary not in (None, "dirichlet", "neumann"):
            raise ValueError(f"pi_boundary must be dirichlet or neumann, got {self.pi_boundary!r}")
        if self.pi_boundary == "neumann" and self.params.omega > 0:
            raise ValueError("the potential is infinite at phi = pi when omega > 0")

    def refined(self) -> "DiscretizationConfig":
        return DiscretizationConfig(
            2 * self.grid_size, self.angular_degree, self.params, self.domain_map, self.pi_boundary
        )


@dataclass(frozen=True)
class TridiagonalBlock:
    diag: np.ndarray
    offdiag: np.ndarray
    nodes: np.ndarray
    label: str = ""


@dataclass(frozen=True)
class RadialProblem:
    config: DiscretizationConfig
    blocks: tuple[TridiagonalBlock, ...]
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class OracleSpectrum:
    eigenvalues: tuple[float, ...]
    n: int
    estimated_error: tuple[float, ...]
    coarse: tuple[float, ...] = field(default=(), repr=False)
    fine: tuple[float, ...] = field(default=(), repr=False)


def _cell_weights(lo: np.ndarray, hi: np.ndarray, power: int) -> np.ndarray:
    """int_lo^hi sin^power(phi) dphi per cell."""
    if power == 0:
        return hi - lo
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * _GL_X[None, :]
    return half * (np.sin(pts) ** power @ _GL_W)


def _symmetrize(A_diag, A_off, w, nodes, label) -> TridiagonalBlock:
    s = np.sqrt(w)
    return TridiagonalBlock(A_diag / w, A_off / (s[:-1] * s[1:]), nodes, label)


def _half_line_block(
    N: int, h: float, d: int, n: int, omega: float, left_neumann: bool, right_neumann: bool, label: str
) -> tuple[TridiagonalBlock, list[str]]:
    notes: list[str] = []
    i = np.arange(N + 1)
    phi = i * h
    lo_idx = 0 if left_neumann else 1
    hi_idx = N if right_neumann else N - 1
    idx = i[lo_idx : hi_idx + 1]
    nodes = phi[idx]

    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        pot = np.where(nodes > 0, n * (n + d - 2) / np.sin(nodes) ** 2, 0.0) if n else np.zeros_like(nodes)
        if omega > 0:
            pot = pot + omega**2 * np.tan(nodes / 2) ** 2
    if not np.all(np.isfinite(pot)):
        bad = ~np.isfinite(pot)
        if right_neumann or np.any(bad[:-1]):
            raise ValueError("potential is infinite at an interior node")
        notes.append(f"dropped node phi={nodes[-1]:.6g} next to pi: potential overflow")
        idx, nodes, pot = idx[:-1], nodes[:-1], pot[:-1]

    cell_lo = np.maximum(nodes - h / 2, 0.0)
    cell_hi = np.minimum(nodes + h / 2, math.pi)
    w = _cell_weights(cell_lo, cell_hi, d - 1)
    flux = np.sin(phi[:-1] + h / 2) ** (d - 1)  # p at i + 1/2, i = 0..N-1

    left = np.where(idx > 0, flux[np.maximum(idx - 1, 0)], 0.0)
    right = np.where(idx < N, flux[np.minimum(idx, N - 1)], 0.0)
    A_diag = (left + right) / h + pot * w
    A_off = -flux[idx[:-1]] / h
    return _symmetrize(A_diag, A_off, w, nodes, label), notes


def assemble_radial_problem(config: DiscretizationConfig) -> RadialProblem:
    """Tridiagonal blocks whose union of spectra approximates the mode-n radial spectrum."""
    p = config.params
    d, omega, n, N = p.d, p.omega, config.angular_degree, config.grid_size

    if d == 1:
        h = 2.0 * math.pi / N
        if omega > 0:
            nodes = -math.pi + h * np.arange(1, N)
            pot = omega**2 * np.tan(nodes / 2) ** 2
            diag = 2.0 / h**2 + pot
            off = np.full(N - 2, -1.0 / h**2)
            return RadialProblem(config, (TridiagonalBlock(diag, off, nodes, "full line"),))
        if N % 2:
            raise ValueError("d=1, omega=0 needs an even grid size")
        even, _ = _half_line_block(N // 2, h, 1, 0, 0.0, True, True, "even")
        odd, _ = _half_line_block(N // 2, h, 1, 0, 0.0, False, False, "odd")
        return RadialProblem(config, (even, odd), ("circle split into even and odd halves",))

    h = math.pi / N
    pi_neumann = config.pi_boundary == "neumann" or (config.pi_boundary is None and omega == 0.0)
    notes = []
    if pi_neumann and n > 0:
        # centrifugal term is infinite at the pole; regular solutions vanish there
        pi_neumann = False
        notes.append("n > 0: Dirichlet at phi = pi")
    block, extra = _half_line_block(N, h, d, n, omega, n == 0, pi_neumann, f"n={n}")
    return RadialProblem(config, (block,), tuple(notes + extra))


def block_eigenvalues(problem: RadialProblem, count: int) -> np.ndarray:
    """Lowest ``count`` eigenvalues over all blocks, ascending."""
    found = []
    for b in problem.blocks:
        k = min(count, b.diag.size)
        found.append(
            eigh_tridiagonal(
                b.diag, b.offdiag, eigvals_only=True, select="i",
                select_range=(0, k - 1), lapack_driver="stebz",
            )
        )
    return np.sort(np.concatenate(found))[:count]


def lowest_eigenvalues(config: DiscretizationConfig, count: int) -> OracleSpectrum:
    """Richardson-extrapolated lowest eigenvalues from grids N and 2N."""
    if count < 1 or count > config.grid_size // 10:
        raise ValueError(f"count must be in [1, grid_size/10], got {count}")
    coarse = block_eigenvalues(assemble_radial_problem(config), count)
    fine = block_eigenvalues(assemble_radial_problem(config.refined()), count)
    extrap = (4.0 * fine - coarse) / 3.0
    err = np.abs(extrap - fine)
    return OracleSpectrum(
        tuple(float(x) for x in extrap),
        config.angular_degree,
        tuple(float(x) for x in err),
        tuple(float(x) for x in coarse),
        tuple(float(x) for x in fine),
    )
