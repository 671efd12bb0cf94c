#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pucci/errors.hpp"
#include "pucci/grid.hpp"
#include "pucci/grid2d.hpp"
#include "pucci/radial_spectra.hpp"
#include "pucci/semilinear.hpp"

using namespace pucci;

namespace {

bool has_node(const Grid2D& g, Vec2 p) {
    return std::any_of(g.nodes().begin(), g.nodes().end(),
                       [&](const GridNode& n) { return (n.pos - p).norm() < 1e-12; });
}

}  // namespace

TEST_CASE("coarse grids enumerate interior lattice points") {
    const auto disc = build_grid(DomainSpec::disc(1), 0.5);
    CHECK(disc->size() == 9);
    CHECK(has_node(*disc, {0, 0}));
    CHECK(has_node(*disc, {0.5, 0.5}));

    const auto cap = build_grid(DomainSpec::cap_disc(1, {0, 1}), 0.5);
    CHECK(cap->size() == 3);
    CHECK(has_node(*cap, {0, 0.5}));
    CHECK(!has_node(*cap, {0, 0}));

    CHECK(build_grid(DomainSpec::rectangle(1, 1), 0.5)->size() == 9);
    CHECK_THROWS_AS(build_grid(DomainSpec::cap_disc(0.4, {0, 1}), 0.5), GridError);
    CHECK_THROWS_AS(build_grid(DomainSpec::disc(1), 0.0), GridError);
}

TEST_CASE("stencil directions") {
    CHECK(stencil_directions({4}).size() == 4);
    CHECK(stencil_directions({16}).size() == 16);
    CHECK_THROWS_AS(stencil_directions({5}), InputError);
    for (const auto& d : stencil_directions({16})) CHECK(d.angle() >= 0.0);
}

TEST_CASE("discrete pucci is exact on quadratics") {
    const auto g = build_grid(DomainSpec::disc(1), 1.0 / 16);
    const auto u = ScalarField::sample(g, [](Vec2 x) { return x.x * x.x - x.y * x.y; });
    const auto m = discrete_pucci(u, {1, 2}, Sign::plus);
    const int center = g->node_at(0, 0);
    CHECK(m[center] == doctest::Approx(2.0));
    CHECK(discrete_pucci(u, {1, 2}, Sign::minus)[center] == doctest::Approx(-2.0));
    const auto zero = discrete_pucci(ScalarField(g), {1, 2}, Sign::plus);
    CHECK(zero.sup_norm() == 0.0);
}

TEST_CASE("Shortley-Weller arms are exact for quadratics vanishing on the boundary") {
    const auto g = build_grid(DomainSpec::disc(1), 0.1);
    const auto u = ScalarField::sample(g, [](Vec2 x) { return 1 - x.dot(x); });
    const auto m = discrete_pucci(u, {1, 1}, Sign::plus);
    for (int k = 0; k < g->size(); ++k) CHECK(m[k] == doctest::Approx(-4.0).epsilon(1e-9));
}

TEST_CASE("torsion problem") {
    const auto g = build_grid(DomainSpec::disc(1), 1.0 / 16);
    const ScalarField one(g, 1.0), zero(g, 0.0);
    const auto u = solve_dirichlet(zero, 0.0, one, {1, 1}, Sign::plus);
    CHECK(interpolate(u, {0, 0}) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(solve_dirichlet(zero, 0.0, zero, {1, 2}, Sign::plus).sup_norm() == 0.0);

    // M+ torsion against radial shooting of -M+(u) = 1.
    const auto v = solve_dirichlet(zero, 0.0, one, {1, 2}, Sign::plus);
    const auto rp =
        solve_semilinear_radial(RadialDomain::ball(1), {1, 2}, Sign::plus, NonlinearitySpec::constant(1.0), 1.0, 0);
    CHECK(interpolate(v, {0, 0}) == doctest::Approx(rp.values.front()).epsilon(0.01));
}

TEST_CASE("dirichlet solver residual") {
    const auto g = build_grid(DomainSpec::annulus(0.5, 1), 1.0 / 16);
    DirichletSolver s(g, std::vector<double>(g->size(), 2.0), 0.0, {1, 3}, Sign::plus);
    const std::vector<double> rhs(g->size(), 1.0);
    const auto u = s.solve(rhs);
    const auto r = s.residual(u, rhs);
    double worst = 0.0;
    for (double v : r) worst = std::max(worst, std::abs(v));
    CHECK(worst <= 1e-8);
    CHECK(s.last_stats().policy_rounds >= 1);
}

TEST_CASE("laplacian grid eigenvalues") {
    const double disc =
        principal_eigenvalue_grid(0.0, DomainSpec::disc(1), 1.0 / 32, {1, 1}, Sign::plus, Cone::positive).lambda;
    CHECK(disc == doctest::Approx(oracle::j01_sq).epsilon(0.02));
    const auto half =
        principal_eigenvalue_grid(0.0, DomainSpec::cap_disc(1, {1, 0}), 1.0 / 32, {1, 1}, Sign::plus, Cone::positive);
    CHECK(half.lambda == doctest::Approx(oracle::j11_sq).epsilon(0.02));
    CHECK(half.lambda_lo <= half.lambda);
    CHECK(half.lambda <= half.lambda_hi);
    CHECK(half.field().min() >= 0.0);
    CHECK(eigen_residual(half.field(), std::vector<double>(half.field().size(), 0.0), half.lambda, {1, 1},
                         Sign::plus) <= 1e-3 * half.lambda * half.field().sup_norm());
}

TEST_CASE("refinement of grid eigenvalues converges at second order") {
    const auto dom = DomainSpec::disc(1);
    double prev_err = 0.0;
    for (double h : {0.1, 0.05}) {
        const double l = principal_eigenvalue_grid(0.0, dom, h, {1, 1}, Sign::plus, Cone::positive).lambda;
        const double err = std::abs(l - oracle::j01_sq);
        if (prev_err > 0.0) CHECK(err < 0.4 * prev_err);
        prev_err = err;
    }
}

TEST_CASE("grid eigengap, duality and shift identity") {
    const auto g = build_grid(DomainSpec::disc(1), 1.0 / 16);
    const EllipticityPair ell(1, 2);
    const auto p = principal_eigenvalue_grid(0.0, g, ell, Sign::plus, Cone::positive);
    const auto m = principal_eigenvalue_grid(0.0, g, ell, Sign::plus, Cone::negative);
    const auto d = principal_eigenvalue_grid(0.0, g, ell, Sign::minus, Cone::positive);
    CHECK(m.lambda > p.lambda);
    CHECK(m.lambda == doctest::Approx(d.lambda).epsilon(1e-9));
    CHECK(m.field().max() <= 0.0);
    for (double s : {-3.0, 7.0}) {
        const double ls = principal_eigenvalue_grid(s, g, ell, Sign::plus, Cone::positive).lambda;
        CHECK(std::abs(ls - (p.lambda - s)) <= 1e-6);
    }
}

TEST_CASE("maximum principle below the principal eigenvalue") {
    const auto g = build_grid(DomainSpec::disc(1), 1.0 / 16);
    const EllipticityPair ell(1, 2);
    const double l1 = principal_eigenvalue_grid(0.0, g, ell, Sign::plus, Cone::positive).lambda;
    const auto rhs =
        ScalarField::sample(g, [](Vec2 x) { return std::max(0.0, 0.25 - (x - Vec2{0.3, 0}).dot(x - Vec2{0.3, 0})); });
    for (double frac : {0.0, 0.5, 0.9}) {
        const ScalarField c(g, frac * l1);
        const auto u = solve_dirichlet(c, 0.0, rhs, ell, Sign::plus);
        CHECK(u.min() >= -1e-12);
        CHECK(u.max() > 0.0);
    }
}

TEST_CASE("field potential matches a constant potential") {
    const auto g = build_grid(DomainSpec::disc(1), 1.0 / 16);
    const double a = principal_eigenvalue_grid(Potential(2.0), g, {1, 2}, Sign::plus, Cone::positive).lambda;
    const double b =
        principal_eigenvalue_grid(Potential(ScalarField(g, 2.0)), g, {1, 2}, Sign::plus, Cone::positive).lambda;
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("nodal refinement finds the antisymmetric laplacian mode") {
    const auto g = build_grid(DomainSpec::disc(1), 1.0 / 32);
    const auto psi0 = ScalarField::sample(g, [](Vec2 x) {
        const double r = x.norm();
        return r == 0.0 ? 0.0 : std::cyl_bessel_j(1.0, oracle::j11 * r) * x.x / r;
    });
    const auto out = nodal_candidate_refine(14.0, psi0, 0.0, {1, 1}, Sign::plus);
    REQUIRE(out.converged);
    CHECK(out.result.lambda == doctest::Approx(oracle::j11_sq).epsilon(0.02));
    CHECK(out.result.zero_count == 1);

    const auto pos = ScalarField::sample(g, [](Vec2 x) { return 1 - x.dot(x); });
    const auto p = nodal_candidate_refine(5.0, pos, 0.0, {1, 1}, Sign::plus);
    REQUIRE(p.converged);
    const double l1 = principal_eigenvalue_grid(0.0, g, {1, 1}, Sign::plus, Cone::positive).lambda;
    CHECK(p.result.lambda == doctest::Approx(l1).epsilon(1e-6));
}

TEST_CASE("richardson extrapolation") {
    const auto r = richardson(4.0, 1.0);
    CHECK(r.extrapolated == doctest::Approx(0.0));
    CHECK(r.error == doctest::Approx(3.0));
}

TEST_CASE("interpolation and transfer") {
    const auto g = build_grid(DomainSpec::disc(1), 1.0 / 16);
    const auto u = ScalarField::sample(g, [](Vec2 x) { return x.x * x.x + 2 * x.y; });
    CHECK(interpolate(u, {0.1, 0.2}) == doctest::Approx(0.41).epsilon(1e-10));
    CHECK(interpolate(u, {2.0, 0.0}) == 0.0);
    for (int i = 0; i < g->size(); ++i) CHECK(interpolate(u, g->node(i).pos) == u[i]);
    const auto fine = build_grid(DomainSpec::disc(1), 1.0 / 32);
    const auto t = transfer(u, fine);
    CHECK(t.size() == fine->size());
}

TEST_CASE("snapshot round trip") {
    const auto g = build_grid(DomainSpec::annulus(0.5, 1), 0.125);
    const auto u = ScalarField::sample(g, [](Vec2 x) { return std::sin(3 * x.x) * x.y; });
    std::stringstream ss;
    write_snapshot(ss, u);
    const auto snap = read_snapshot(ss);
    const auto v = field_from_snapshot(snap, g);
    for (int i = 0; i < g->size(); ++i) CHECK(v[i] == doctest::Approx(u[i]).epsilon(1e-12));
}

TEST_CASE("sign regions") {
    const auto g = build_grid(DomainSpec::disc(1), 1.0 / 16);
    int n = 0;
    label_sign_regions(ScalarField::sample(g, [](Vec2 x) { return x.x * x.y; }), 1e-9, n);
    CHECK(n == 4);
    label_sign_regions(ScalarField(g, 1.0), 1e-9, n);
    CHECK(n == 1);
}
