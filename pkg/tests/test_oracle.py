from __future__ import annotations

import math

import numpy as np
import pytest

from spherical_oscillator.oracle import (
    DiscretizationConfig,
    assemble_radial_problem,
    block_eigenvalues,
    lowest_eigenvalues,
)
from spherical_oscillator.spectrum import ModelParams, eigenvalue, ground_state

SQRT12 = 2 * math.sqrt(3.0)


def _lowest(d, omega, n, N=1000, count=1):
    return block_eigenvalues(assemble_radial_problem(DiscretizationConfig(N, n, ModelParams(d, omega))), count)


def test_config_validation():
    p = ModelParams(2, 1.0)
    with pytest.raises(ValueError):
        DiscretizationConfig(50, 0, p)
    with pytest.raises(ValueError):
        DiscretizationConfig(200, 0, p, domain_map="linear")
    with pytest.raises(ValueError):
        DiscretizationConfig(200, 1, ModelParams(1, 1.0))
    with pytest.raises(ValueError):
        DiscretizationConfig(200, 0, p, pi_boundary="neumann")


def test_count_limit():
    with pytest.raises(ValueError):
        lowest_eigenvalues(DiscretizationConfig(100, 0, ModelParams(2, 0.0)), 11)


def test_assembly_examples():
    assert _lowest(2, 0.0, 0)[0] == pytest.approx(0.0, abs=1e-3)
    assert _lowest(2, 0.0, 1)[0] == pytest.approx(2.0, abs=1e-3)
    assert _lowest(1, 1.0, 0)[0] == pytest.approx((math.sqrt(17) + 1) / 8, rel=1e-3)


def test_symmetric_tridiagonal_blocks():
    problem = assemble_radial_problem(DiscretizationConfig(200, 2, ModelParams(3, 1.0)))
    (block,) = problem.blocks
    assert block.offdiag.size == block.diag.size - 1
    assert np.all(np.isfinite(block.diag)) and np.all(block.offdiag < 0)


def test_node_next_to_pi_dropped_when_potential_overflows():
    # omega^2 tan^2(phi/2) overflows only at the node nearest pi
    problem = assemble_radial_problem(DiscretizationConfig(200, 0, ModelParams(2, 2e152)))
    assert any("dropped" in note for note in problem.notes)
    assert np.all(np.isfinite(problem.blocks[0].diag))
    assert problem.blocks[0].diag.size == 199


def test_overflow_at_interior_node_rejected():
    with pytest.raises(ValueError):
        assemble_radial_problem(DiscretizationConfig(200, 0, ModelParams(2, 1e153)))


def test_lowest_examples():
    sol = lowest_eigenvalues(DiscretizationConfig(1000, 0, ModelParams(2, 0.0)), 3)
    np.testing.assert_allclose(sol.eigenvalues, [0, 2, 6], atol=1e-3)
    sol = lowest_eigenvalues(DiscretizationConfig(2000, 1, ModelParams(2, SQRT12)), 4)
    assert sol.eigenvalues[3] == pytest.approx(44.0, rel=1e-4)
    p = ModelParams(3, 1.0)
    sol = lowest_eigenvalues(DiscretizationConfig(1000, 0, p), 2)
    np.testing.assert_allclose(sol.eigenvalues, [eigenvalue(p, (0, 0)), eigenvalue(p, (1, 0))], rtol=1e-3)


def test_spectrum_is_ascending_with_nonnegative_errors():
    sol = lowest_eigenvalues(DiscretizationConfig(400, 1, ModelParams(3, 2.0)), 6)
    assert list(sol.eigenvalues) == sorted(sol.eigenvalues)
    assert all(e >= 0 for e in sol.estimated_error)


def test_second_order_convergence():
    p = ModelParams(2, 0.0)
    errs = []
    for N in (200, 400, 800):
        lam = block_eigenvalues(assemble_radial_problem(DiscretizationConfig(N, 1, p)), 3)
        errs.append(np.abs(lam - np.array([2.0, 6.0, 12.0])))
    ratios = np.array(errs[0]) / np.array(errs[1]), np.array(errs[1]) / np.array(errs[2])
    for r in ratios:
        assert np.all((r > 3.5) & (r < 4.5))


def test_richardson_improves_on_fine_grid():
    p = ModelParams(2, 1.0)
    sol = lowest_eigenvalues(DiscretizationConfig(500, 1, p), 4)
    exact = np.array([eigenvalue(p, (m, 1)) for m in range(4)])
    assert np.all(np.abs(np.array(sol.eigenvalues) - exact) < np.abs(np.array(sol.fine) - exact))


def test_d1_free_circle_multiplicities():
    sol = lowest_eigenvalues(DiscretizationConfig(1000, 0, ModelParams(1, 0.0)), 5)
    np.testing.assert_allclose(sol.eigenvalues, [0, 1, 1, 4, 4], atol=1e-6)


def test_d1_ground_state():
    p = ModelParams(1, 2.0)
    sol = lowest_eigenvalues(DiscretizationConfig(1000, 0, p), 1)
    assert sol.eigenvalues[0] == pytest.approx(ground_state(p).energy, rel=1e-6)


def test_monotone_approach_for_decaying_modes():
    # quadrature-weighted cells are not variational: the approach is one-sided, from below here
    p = ModelParams(2, 1.0)
    sol = lowest_eigenvalues(DiscretizationConfig(400, 1, p), 3)
    exact = np.array([eigenvalue(p, (m, 1)) for m in range(3)])
    coarse, fine = np.array(sol.coarse) - exact, np.array(sol.fine) - exact
    assert np.all(np.sign(coarse) == np.sign(fine))
    assert np.all(np.abs(fine) < np.abs(coarse))


def test_deterministic():
    cfg = DiscretizationConfig(600, 2, ModelParams(3, 1.0))
    assert lowest_eigenvalues(cfg, 4) == lowest_eigenvalues(cfg, 4)
