#pragma once

#include <vector>

#include "pucci/eigen_result.hpp"
#include "pucci/grid.hpp"
#include "pucci/pucci_core.hpp"

namespace pucci {

/// f(u) = c0 + (c1 + mu) u + c_p |u|^{p-1} u.
struct NonlinearitySpec {
    double c0 = 0.0;
    double c1 = 0.0;
    double p = 1.0;
    double c_p = 0.0;
    double mu = 0.0;

    void validate() const;
    double f(double u) const;
    double df(double u) const;
    bool is_convex() const { return c_p >= 0.0; }

    static NonlinearitySpec constant(double c0);
    static NonlinearitySpec linear(double slope);
    static NonlinearitySpec power(double p, double c_p);
};

/// Radial solution of -M^sign(D^2 u) = f(u) with u = 0 on the outer sphere
/// (and inner sphere for annuli) having exactly `target_zeros` interior
/// zeros. The shooting amplitude (u(0) on a ball, u'(r_inner) on an annulus)
/// is scanned over init_slope * 2^j, |j| <= 40, then over the opposite sign,
/// and bisected.
RadialProfile solve_semilinear_radial(const RadialDomain& dom, const EllipticityPair& ell, Sign sign,
                                      const NonlinearitySpec& nl, double init_slope, int target_zeros);

struct SemilinearStats {
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
};

/// Grid solution of -M^sign_h(u) = f(u) by damped frozen-coefficient
/// linearization, started from u0 (zero when u0 has no grid).
ScalarField solve_semilinear_grid(const GridPtr& grid, const EllipticityPair& ell, Sign sign,
                                  const NonlinearitySpec& nl, const ScalarField& u0 = {},
                                  SemilinearStats* stats = nullptr);

ScalarField solve_semilinear_grid(const DomainSpec& dom, double h, const EllipticityPair& ell, Sign sign,
                                  const NonlinearitySpec& nl, const ScalarField& u0 = {}, const StencilConfig& st = {},
                                  SemilinearStats* stats = nullptr);

/// Sup-norm of -M_h(u) - f(u).
double semilinear_residual(const ScalarField& u, const EllipticityPair& ell, Sign sign, const NonlinearitySpec& nl);

/// Pointwise f'(u).
RadialProfile linearized_potential(const RadialProfile& u, const NonlinearitySpec& nl);
ScalarField linearized_potential(const ScalarField& u, const NonlinearitySpec& nl);

}  // namespace pucci
