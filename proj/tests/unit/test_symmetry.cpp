#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pucci/errors.hpp"
#include "pucci/grid2d.hpp"
#include "pucci/radial_spectra.hpp"
#include "pucci/symmetry.hpp"

using namespace pucci;

namespace {

GridPtr disc_grid(double h = 1.0 / 32) { return build_grid(DomainSpec::disc(1), h); }

ScalarField sample(const GridPtr& g, double (*fn)(Vec2)) { return ScalarField::sample(g, fn); }

double gaussian(Vec2 x) { return std::exp(-x.dot(x)); }
double x1_bump(Vec2 x) { return x.x * (1 - x.dot(x)); }
double x1x2_bump(Vec2 x) { return x.x * x.y * (1 - x.dot(x)); }

}  // namespace

TEST_CASE("reflections of simple fields") {
    const auto g = disc_grid();
    const double h = g->h();
    const Vec2 e = unit_at_angle(0.3);
    const auto lin = ScalarField::sample(g, [&](Vec2 x) { return x.dot(e) * (1 - x.dot(x)); });
    const auto rl = reflect_field(lin, e);
    CHECK((rl + lin).sup_norm() <= 10 * h * h);
    const auto perp = ScalarField::sample(g, [&](Vec2 x) { return x.dot(e.perp()) * (1 - x.dot(x)); });
    CHECK((reflect_field(perp, e) - perp).sup_norm() <= 10 * h * h);
    const auto gs = sample(g, gaussian);
    CHECK((reflect_field(gs, e) - gs).sup_norm() <= 10 * h * h);
    // Lattice reflections are exact.
    CHECK((reflect_field(gs, {1, 0}) - gs).sup_norm() == 0.0);
    CHECK_THROWS_AS(reflect_field(ScalarField(build_grid(DomainSpec::cap_disc(1, {0, 1}), 0.1)), {0, 1}), DomainError);
}

TEST_CASE("reflection gap classification") {
    const auto g = disc_grid();
    CHECK(reflection_gap(sample(g, gaussian), unit_at_angle(0.7)).sign == ReflectionSign::zero);
    CHECK(reflection_gap(sample(g, x1_bump), {1, 0}).sign == ReflectionSign::nonneg);
    CHECK(reflection_gap(sample(g, x1_bump), {-1, 0}).sign == ReflectionSign::nonpos);
    CHECK(reflection_gap(sample(g, x1x2_bump), {1, 0}).sign == ReflectionSign::mixed);
    // Sign evidence at mirrored nodes.
    const auto u = sample(g, x1x2_bump);
    const auto w = reflection_gap(u, {1, 0}).w;
    CHECK(w[g->node_at(8, 8)] > 0);
    CHECK(w[g->node_at(8, -8)] < 0);
}

TEST_CASE("foliated Schwarz detection") {
    const auto g = disc_grid();
    const auto d = DirectionSet::uniform(16);
    CHECK(detect_fss(sample(g, gaussian), d).classification == FssClass::radial);
    const auto fx = detect_fss(sample(g, x1_bump), d);
    CHECK(fx.classification == FssClass::foliated_schwarz);
    REQUIRE(fx.axis_p);
    CHECK((*fx.axis_p - Vec2{1, 0}).norm() <= 1e-6);
    CHECK(detect_fss(sample(g, x1x2_bump), d).classification == FssClass::not_fss);

    const Vec2 p = unit_at_angle(2.0);
    const auto rot = detect_fss(ScalarField::sample(g, [&](Vec2 x) { return x.dot(p) * (1 - x.dot(x)); }), d);
    CHECK(rot.classification == FssClass::foliated_schwarz);
    REQUIRE(rot.axis_p);
    CHECK((*rot.axis_p - p).norm() <= 1e-2);
    CHECK_THROWS_AS(DirectionSet::uniform(4), InputError);
}

TEST_CASE("angular derivative") {
    const auto g = disc_grid();
    const double h = g->h();
    const auto bump = ScalarField::sample(g, [](Vec2 x) { return std::pow(1 - x.dot(x), 2); });
    CHECK(angular_derivative(bump).sup_norm() <= 10 * h * h);
    CHECK(angular_derivative(sample(g, gaussian), AngularClosure::extrapolate).sup_norm() <= 10 * h * h);
    const auto x1 = ScalarField::sample(g, [](Vec2 x) { return x.x; });
    const auto ut = angular_derivative(x1, AngularClosure::extrapolate);
    double worst = 0;
    for (int k = 0; k < g->size(); ++k) worst = std::max(worst, std::abs(ut[k] + g->node(k).pos.y));
    CHECK(worst <= 10 * h * h);
    const auto phi = principal_eigenvalue_grid(0.0, g, {1, 2}, Sign::plus, Cone::positive).field();
    CHECK(angular_derivative(phi).sup_norm() <= 10 * h * h * phi.sup_norm());
}

TEST_CASE("subsolution residual") {
    const auto g = disc_grid(1.0 / 16);
    CHECK(subsolution_residual(ScalarField(g), ScalarField(g), {1, 2}) == 0.0);
    const auto e = principal_eigenvalue_grid(0.0, g, {1, 2}, Sign::plus, Cone::positive);
    const ScalarField phi = e.field().scaled(1.0 / e.field().sup_norm());
    CHECK(std::abs(subsolution_residual(phi, ScalarField(g, e.lambda), {1, 2})) <= 1e-4 * e.lambda);
}

TEST_CASE("nodal analysis") {
    const auto g = disc_grid();
    const auto phi = principal_eigenvalue_grid(0.0, g, {1, 1}, Sign::plus, Cone::positive).field();
    const auto n1 = nodal_analysis(phi);
    CHECK(n1.num_nodal_regions == 1);
    CHECK(!n1.touches_boundary);

    const auto second = ScalarField::sample(g, [](Vec2 x) { return std::cyl_bessel_j(0.0, oracle::j02 * x.norm()); });
    const auto n2 = nodal_analysis(second);
    CHECK(n2.num_nodal_regions == 2);
    CHECK(!n2.touches_boundary);
    CHECK(!n2.contains_origin);
    for (const auto& edge : n2.sign_change_edges) {
        const double r = 0.5 * (g->node(edge.a).pos.norm() + g->node(edge.b).pos.norm());
        CHECK(std::abs(r - oracle::radial_nodal_radius) <= 1.5 * g->h());
    }

    const auto n3 = nodal_analysis(sample(g, x1_bump));
    CHECK(n3.num_nodal_regions == 2);
    CHECK(n3.touches_boundary);
    CHECK(n3.contains_origin);
}

TEST_CASE("family estimates") {
    const auto disc = DomainSpec::disc(1);
    const double h = 1.0 / 16;
    FamilyOptions t0;
    t0.directions = 2;  // the two lattice axes
    t0.offsets = 1;
    const double tilde =
        principal_eigenvalue_grid(0.0, DomainSpec::cap_disc(1, {1, 0}), h, {1, 2}, Sign::plus, Cone::positive).lambda;
    const auto mu = mu2_family_estimate(0.0, disc, h, {1, 2}, FamilyKind::caps, t0);
    CHECK(mu.value == doctest::Approx(tilde).epsilon(1e-6));
    CHECK(mu.members == 2);

    FamilyOptions caps;
    caps.directions = 4;
    caps.offsets = 3;
    const auto ml = mu2_family_estimate(0.0, disc, h, {1, 1}, FamilyKind::caps, caps);
    const auto gl = gamma2_family_estimate(0.0, disc, h, {1, 1}, FamilyKind::caps, caps);
    CHECK(gl.value == doctest::Approx(ml.value).epsilon(1e-9));
    CHECK(ml.value == doctest::Approx(oracle::j11_sq).epsilon(0.03));

    const auto m2 = mu2_family_estimate(0.0, disc, h, {1, 2}, FamilyKind::caps, caps);
    const auto g2 = gamma2_family_estimate(0.0, disc, h, {1, 2}, FamilyKind::caps, caps);
    CHECK(g2.value > m2.value);

    FamilyOptions conc;
    conc.radii = 5;
    const auto mc = mu2_family_estimate(0.0, disc, h, {1, 1}, FamilyKind::concentric, conc);
    CHECK(mc.value > ml.value);
    CHECK(family_kind_from_string(to_string(FamilyKind::concentric)) == FamilyKind::concentric);
}

TEST_CASE("radial profile sampling") {
    const auto e = principal_eigenvalue_radial(RadialDomain::ball(1), {1, 1}, 0, Sign::plus, Cone::positive);
    const auto g = disc_grid(1.0 / 16);
    const auto f = sample_radial_profile(e.profile(), g);
    const double c = f[g->node_at(0, 0)];
    for (int k = 0; k < g->size(); ++k)
        CHECK(f[k] ==
              doctest::Approx(c * std::cyl_bessel_j(0.0, oracle::j01 * g->node(k).pos.norm())).epsilon(1e-4).scale(c));
}
