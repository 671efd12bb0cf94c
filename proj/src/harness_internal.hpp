#pragma once

#include <string>

#include "pucci/eigen_result.hpp"
#include "pucci/grid2d.hpp"
#include "pucci/harness.hpp"
#include "pucci/radial_spectra.hpp"

namespace pucci::detail {

/// Values at two resolutions; `error` is their difference.
struct Pair {
    double value = 0.0;
    double coarse = 0.0;
    double error = 0.0;
    double extrapolated = 0.0;
    EigenResult fine;
};

/// Grid eigenvalue at h and 2h.
Pair grid_pair(const Potential& c, const DomainSpec& dom, double h, const EllipticityPair& ell, Sign sign, Cone cone,
               const StencilConfig& st = {});

/// Radial eigenvalue at the default step and twice that step.
Pair radial_pair(const RadialDomain& dom, const EllipticityPair& ell, double c0, Sign sign, Cone cone,
                 double step = 0.0);
Pair radial_nodal_pair(const RadialDomain& dom, const EllipticityPair& ell, double c0, Sign sign, int zeros,
                       double step = 0.0);

RadialDomain radial_domain_of(const DomainSpec& dom);

/// Smooth positive bump vanishing on the boundary of the base shape.
double bump(const DomainSpec& dom, Vec2 x);

/// cos(3 pi x / 2a) cos(pi y / 2b) + cos(pi x / 2a) cos(3 pi y / 2b)
double doubly_symmetric_field(double a, double b, Vec2 x);

std::string fmt(double v);

}  // namespace pucci::detail
