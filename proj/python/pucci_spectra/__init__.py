"""Principal and nodal eigenvalues of Pucci extremal operators."""

from ._core import (
    Cone,
    ConfigError,
    DomainSpec,
    EllipticityPair,
    FamilyKind,
    FssClass,
    Field,
    Grid,
    Nonlinearity,
    PucciError,
    RadialDomain,
    Sign,
    Vec2,
    __version__,
    angular_derivative,
    build_grid,
    detect_fss,
    discrete_pucci,
    gamma2_family_estimate,
    linearized_potential,
    mu2_family_estimate,
    nodal_analysis,
    nodal_candidate_refine,
    principal_eigenvalue_grid,
    principal_eigenvalue_radial,
    pucci_minus,
    pucci_plus,
    pucci_sup_oracle,
    radial_nodal_eigenvalue,
    reflection_gap,
    run,
    solve_dirichlet,
    solve_semilinear_grid,
    solve_semilinear_radial,
    subsolution_residual,
    sym_eigenvalues,
)


def sample(grid, fn):
    """Field with values fn(x, y) at the grid nodes."""
    return Field(grid, [float(fn(x, y)) for x, y in grid.positions()])


__all__ = [name for name in dir() if not name.startswith("_")]
