#pragma once

#include <functional>

#include "pucci/eigen_result.hpp"
#include "pucci/pucci_core.hpp"

namespace pucci {

/// Pucci operator on a radial function: D^2 u has eigenvalue u'' once and
/// u'/r with multiplicity n - 1. Requires r > 0.
double radial_operator_value(double r, double up, double upp, const EllipticityPair& ell, int n, Sign sign);

struct ShootResult {
    double end_value = 0.0;
    int zero_count = 0;    ///< sign changes strictly inside (r_inner, r_outer)
    int sign_changes = 0;  ///< sign changes including the endpoint
    double max_abs = 0.0;
    RadialProfile profile;  ///< filled only when requested
};

struct ShootOptions {
    double step = 0.0;  ///< 0 selects width / 20000
    bool keep_profile = true;
};

/// Default integration step for a domain.
double default_radial_step(const RadialDomain& dom);

/// Integrates M^sign(D^2 phi) + (c0 + lambda) phi = 0 outward from
/// r_inner (phi = 0, phi' = +-1) or the origin (phi = +-1, phi' = 0) with
/// classical RK4. Throws DivergenceError on overflow.
ShootResult shoot(const RadialDomain& dom, const EllipticityPair& ell, Sign sign, Cone cone, double lambda, double c0,
                  const ShootOptions& opts = {});

/// General radial initial value problem M^sign(D^2 u) + source(u) = 0 with
/// u(r_inner) = start_value, u'(r_inner) = start_slope (ball: slope must be 0).
ShootResult shoot_source(const RadialDomain& dom, const EllipticityPair& ell, Sign sign,
                         const std::function<double(double)>& source, double start_value, double start_slope,
                         const ShootOptions& opts = {});

struct RadialEigenOptions {
    double step = 0.0;         ///< integration step, 0 for the default
    double lambda_tol = 1e-8;  ///< absolute bisection tolerance
    double scan_step = 0.0;    ///< > 0: linear upward scan for the bracket instead of doubling
};

/// Principal eigenvalue lambda_1^cone of M^sign + c0 by shooting and
/// bisection; cone = negative shoots from phi(0) = -1 directly, which is the
/// same problem as lambda_1^+ of the dual operator.
EigenResult principal_eigenvalue_radial(const RadialDomain& dom, const EllipticityPair& ell, double c0, Sign sign,
                                        Cone cone, const RadialEigenOptions& opts = {});

/// Smallest radial eigenvalue whose eigenfunction has `interior_zeros`
/// interior zeros; both cone initializations are tried and the smaller
/// eigenvalue is reported.
EigenResult radial_nodal_eigenvalue(const RadialDomain& dom, const EllipticityPair& ell, double c0, Sign sign,
                                    int interior_zeros, const RadialEigenOptions& opts = {});

/// Same for one fixed initialization.
EigenResult radial_eigenvalue_with_zeros(const RadialDomain& dom, const EllipticityPair& ell, double c0, Sign sign,
                                         Cone cone, int interior_zeros, const RadialEigenOptions& opts = {});

/// Sup-norm of the finite-difference residual of the radial equation
/// M^sign(D^2 u) + source(u) = 0 along a profile, skipping the origin layer.
double radial_residual(const RadialProfile& p, const EllipticityPair& ell, int dim, Sign sign,
                       const std::function<double(double)>& source);

}  // namespace pucci
