"""Three critical points (positive, negative, sign-changing) of the
critical-growth p-Laplace energy on the unit square or cube."""

from ._critp import (  # noqa: F401
    CritpError,
    Mesh,
    Nonlinearity,
    RunParameters,
    SolverConfig,
    best_sobolev_constant,
    build_mesh,
    constraint_phi,
    energy,
    energy_residual,
    initial_point,
    lambda_sweep,
    scale_on_coefficients,
    scale_to_manifold,
    sobolev_threshold,
    solve_three,
    tangent_project,
)

__all__ = [name for name in dir() if not name.startswith("_")]
