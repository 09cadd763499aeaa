"""Spectral theory of the spherical harmonic oscillator Laplacian(S^d) + omega^2 r^2."""

from .spectrum import (
    DegeneracyGroup,
    EigenvalueRecord,
    GroundState,
    ModeIndex,
    ModelParams,
    eigenvalue,
    eigenvalue_shifted,
    enumerate_spectrum,
    find_degenerate_omega,
    ground_state,
    group_degeneracies,
    multiplicity,
)

__version__ = "0.1.0"
