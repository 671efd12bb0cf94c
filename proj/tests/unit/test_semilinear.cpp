#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pucci/errors.hpp"
#include "pucci/grid2d.hpp"
#include "pucci/radial_spectra.hpp"
#include "pucci/semilinear.hpp"

using namespace pucci;

namespace {

// Independent oracle for u'' + u'/r + u^3 = 0, u'(0) = 0, u(1) = 0, u > 0:
// RK4 with a series start and bisection on u(0).
double lane_emden_center() {
    auto end_value = [](double a) {
        const double h = 1e-5;
        double r = h, u = a - std::pow(a, 3) * h * h / 4, up = -std::pow(a, 3) * h / 2;
        auto acc = [](double rr, double v, double vp) { return -vp / rr - v * v * v; };
        while (r < 1.0 - 0.5 * h) {
            const double k1 = up, l1 = acc(r, u, up);
            const double k2 = up + 0.5 * h * l1, l2 = acc(r + 0.5 * h, u + 0.5 * h * k1, up + 0.5 * h * l1);
            const double k3 = up + 0.5 * h * l2, l3 = acc(r + 0.5 * h, u + 0.5 * h * k2, up + 0.5 * h * l2);
            const double k4 = up + h * l3, l4 = acc(r + h, u + h * k3, up + h * l3);
            u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            up += h / 6 * (l1 + 2 * l2 + 2 * l3 + l4);
            r += h;
            if (u < 0) return -1.0;
        }
        return u;
    };
    double lo = 1.0, hi = 10.0;  // positive end below the solution, first zero crossing above
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (end_value(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("nonlinearity evaluation") {
    const NonlinearitySpec nl{0.5, 1.0, 3.0, 1.0, 0.25};
    CHECK(nl.f(2.0) == doctest::Approx(0.5 + 1.25 * 2 + 8));
    CHECK(nl.df(2.0) == doctest::Approx(1.25 + 12));
    CHECK(nl.df(0.0) == doctest::Approx(1.25));
    CHECK(NonlinearitySpec::power(2.0, 1.0).f(-3.0) == doctest::Approx(-9.0));
    CHECK(nl.is_convex());
    CHECK_THROWS_AS((NonlinearitySpec{0, 0, 0.5, 1, 0}.validate()), InputError);
}

TEST_CASE("radial torsion solution") {
    for (double c0 : {1.0, 3.0}) {
        const auto u =
            solve_semilinear_radial(RadialDomain::ball(1), {1, 1}, Sign::plus, NonlinearitySpec::constant(c0), 1.0, 0);
        CHECK(u.values.front() == doctest::Approx(c0 / 4).epsilon(1e-6));
        CHECK(u.at(0.5) == doctest::Approx(c0 * 0.75 / 4).epsilon(1e-4));
    }
    const auto u3 =
        solve_semilinear_radial(RadialDomain::ball(1, 3), {1, 1}, Sign::plus, NonlinearitySpec::constant(1.0), 1.0, 0);
    CHECK(u3.values.front() == doctest::Approx(1.0 / 6).epsilon(1e-6));
}

TEST_CASE("radial Lane-Emden solution matches an independent integrator") {
    const auto u =
        solve_semilinear_radial(RadialDomain::ball(1), {1, 1}, Sign::plus, NonlinearitySpec::power(3.0, 1.0), 1.0, 0);
    CHECK(u.values.front() == doctest::Approx(lane_emden_center()).epsilon(1e-5));
    CHECK(std::abs(u.values.back()) <= 1e-6 * u.sup_norm());
}

TEST_CASE("linear eigenvalue form recovers the principal eigenfunction") {
    const auto ball = RadialDomain::ball(1);
    const auto e = principal_eigenvalue_radial(ball, {1, 2}, 0, Sign::plus, Cone::positive);
    NonlinearitySpec nl;
    nl.mu = e.lambda;
    const auto u = solve_semilinear_radial(ball, {1, 2}, Sign::plus, nl, 1.0, 0);
    const double scale = u.values.front() / e.profile().values.front();
    for (double r : {0.2, 0.5, 0.8}) CHECK(u.at(r) == doctest::Approx(scale * e.profile().at(r)).epsilon(1e-3));
}

TEST_CASE("grid semilinear solves") {
    const auto g = build_grid(DomainSpec::disc(1), 1.0 / 16);
    const auto t = solve_semilinear_grid(g, {1, 1}, Sign::plus, NonlinearitySpec::constant(2.0));
    CHECK(interpolate(t, {0, 0}) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(solve_semilinear_grid(g, {1, 2}, Sign::plus, NonlinearitySpec{}).sup_norm() == 0.0);

    const NonlinearitySpec nl{1.0, 0.1, 1.0, 0.0, 0.0};
    SemilinearStats st;
    const auto u = solve_semilinear_grid(build_grid(DomainSpec::disc(1), 1.0 / 32), {1, 2}, Sign::plus, nl, {}, &st);
    CHECK(semilinear_residual(u, {1, 2}, Sign::plus, nl) <= 1e-7);
    const auto rp = solve_semilinear_radial(RadialDomain::ball(1), {1, 2}, Sign::plus, nl, 1.0, 0);
    CHECK(interpolate(u, {0, 0}) == doctest::Approx(rp.values.front()).epsilon(0.01));
    CHECK(st.iterations >= 1);
}

TEST_CASE("linearized potential") {
    const auto g = build_grid(DomainSpec::disc(1), 0.25);
    const ScalarField two(g, 2.0);
    const NonlinearitySpec lin{0.3, 1.5, 1.0, 0.0, 0.5};
    for (double v : linearized_potential(two, lin).values) CHECK(v == doctest::Approx(2.0));
    const NonlinearitySpec cube{0.0, 1.0, 3.0, 1.0, 0.5};
    for (double v : linearized_potential(two, cube).values) CHECK(v == doctest::Approx(1.5 + 12));
    for (double v : linearized_potential(ScalarField(g), cube).values) CHECK(v == doctest::Approx(1.5));
}
