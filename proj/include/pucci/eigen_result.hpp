#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pucci/grid.hpp"

namespace pucci {

enum class RadialKind { ball, annulus };

/// Ball (r_inner = 0) or annulus centered at the origin in R^dim.
struct RadialDomain {
    RadialKind kind = RadialKind::ball;
    double r_inner = 0.0;
    double r_outer = 1.0;
    int dim = 2;

    static RadialDomain ball(double radius, int dim = 2);
    static RadialDomain annulus(double inner, double outer, int dim = 2);
    void validate() const;
    double width() const { return r_outer - r_inner; }
};

/// Sampled radial function u(r) with derivative u'(r).
struct RadialProfile {
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<double> derivs;

    std::size_t size() const { return radii.size(); }
    double sup_norm() const;
    /// Linear interpolation in r; 0 outside [r_front, r_back].
    double at(double r) const;
    void scale(double t);
};

enum class Cone { positive, negative };

inline std::string to_string(Cone c) { return c == Cone::positive ? "positive" : "negative"; }

/// Eigenvalue estimate with its eigenfunction and diagnostics. Grid solves
/// also report the Collatz-Wielandt bracket [lambda_lo, lambda_hi].
struct EigenResult {
    double lambda = 0.0;
    std::variant<RadialProfile, ScalarField> eigenfunction;
    double residual = 0.0;
    int iterations = 0;
    Cone cone = Cone::positive;
    int zero_count = 0;
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;

    const RadialProfile& profile() const { return std::get<RadialProfile>(eigenfunction); }
    const ScalarField& field() const { return std::get<ScalarField>(eigenfunction); }
};

}  // namespace pucci
