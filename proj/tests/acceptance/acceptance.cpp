// Acceptance suite: one verdict line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pucci/config.hpp"
#include "pucci/geometry.hpp"
#include "pucci/grid.hpp"
#include "pucci/grid2d.hpp"
#include "pucci/harness.hpp"
#include "pucci/pucci_core.hpp"
#include "pucci/radial_spectra.hpp"
#include "pucci/semilinear.hpp"
#include "pucci/symmetry.hpp"

using namespace pucci;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Independent Bessel oracle: RK4 on phi'' + phi'/r + lambda phi = 0 from
// the series start phi(r0) = 1 - lambda r0^2 / 4, returning phi(1) and the
// number of sign changes on (0, 1).
std::pair<double, int> bessel_shot(double lambda, double step) {
    double r = step;
    double y = 1.0 - lambda * r * r / 4.0;
    double yp = -lambda * r / 2.0;
    int changes = 0;
    auto rhs = [lambda](double rr, double v, double vp) { return -vp / rr - lambda * v; };
    const int n = static_cast<int>(std::lround((1.0 - step) / step));
    for (int k = 0; k < n; ++k) {
        const double k1 = yp, l1 = rhs(r, y, yp);
        const double k2 = yp + 0.5 * step * l1, l2 = rhs(r + 0.5 * step, y + 0.5 * step * k1, yp + 0.5 * step * l1);
        const double k3 = yp + 0.5 * step * l2, l3 = rhs(r + 0.5 * step, y + 0.5 * step * k2, yp + 0.5 * step * l2);
        const double k4 = yp + step * l3, l4 = rhs(r + step, y + step * k3, yp + step * l3);
        const double yn = y + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        yp += step / 6.0 * (l1 + 2 * l2 + 2 * l3 + l4);
        if (k + 1 < n && (yn > 0.0) != (y > 0.0)) ++changes;
        y = yn;
        r += step;
    }
    return {y, changes};
}

// Smallest lambda in [lo, hi] whose shot has `zeros` interior sign changes
// and vanishes at r = 1.
double bessel_oracle(int zeros, double lo, double hi) {
    const double step = 1e-5;
    auto side = [&](double lam) {
        auto [end, ch] = bessel_shot(lam, step);
        return ch > zeros || (ch == zeros && (end > 0.0) != (zeros % 2 == 0));
    };
    for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (side(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

// k-th positive zero of J_nu by scan and bisection on std::cyl_bessel_j.
double bessel_zero(double nu, int k) {
    int found = 0;
    double a = 0.5, fa = std::cyl_bessel_j(nu, a);
    for (double b = a + 0.01;; b += 0.01) {
        const double fb = std::cyl_bessel_j(nu, b);
        if ((fa > 0.0) != (fb > 0.0) && ++found == k) {
            double lo = b - 0.01, hi = b;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((std::cyl_bessel_j(nu, lo) > 0.0) == (std::cyl_bessel_j(nu, mid) > 0.0) ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        fa = fb;
    }
}

bool within_rel(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

RunConfig suite_config(const std::string& name) {
    Config raw;
    raw.set("run.experiment", "verify-paper");
    raw.set("suite.name", name);
    return RunConfig::from_config(raw);
}

// Runs suites and reduces their assertions to one verdict. Skipped
// assertions do not count.
Verdict suites_verdict(const std::vector<std::string>& names) {
    Verdict v{true, ""};
    int total = 0, failed = 0;
    std::string first_failure;
    for (const auto& n : names) {
        const RunRecord r = verify_paper_suite(n, suite_config(n));
        if (r.status == exit_solver || r.status == exit_config) {
            v.passed = false;
            if (first_failure.empty()) first_failure = n + ": " + r.message;
        }
        for (const auto& a : r.assertions) {
            if (a.skipped) continue;
            ++total;
            if (!a.passed) {
                ++failed;
                if (first_failure.empty())
                    first_failure =
                        a.name + " (margin " + fmt("%.4g", a.margin) + ", error " + fmt("%.3g", a.error) + ")";
            }
        }
    }
    v.passed = v.passed && failed == 0 && total > 0;
    v.detail = std::to_string(total - failed) + "/" + std::to_string(total) + " checks";
    if (!first_failure.empty()) v.detail += "; first failure: " + first_failure;
    return v;
}

Verdict crit_pucci_oracle() {
    const auto t0 = Clock::now();
    const EllipticityPair ell(1.0, 2.0);
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> normal;
    double worst_gap = 0.0, worst_low = 0.0, worst_dual = 0.0;
    for (int m = 0; m < 100; ++m) {
        SymMatrix a(3);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) a.set(i, j, normal(rng));
        const double fro = a.frobenius_norm();
        const double d = pucci_plus(a, ell) - pucci_sup_oracle(a, ell, 100000, 1000 + m);
        worst_gap = std::max(worst_gap, d / fro);
        worst_low = std::min(worst_low, d / fro);
        worst_dual = std::max(worst_dual, std::abs(pucci_plus(a, ell) + pucci_minus(-a, ell)) / fro);
    }
    const double secs = seconds_since(t0);
    // The lower bound is exact when the oracle attains the sup; allow roundoff.
    const bool ok = worst_low >= -1e-14 && worst_gap <= 1e-3 && worst_dual <= 1e-12 && secs < 10.0;
    return {ok, "max gap/|M| " + fmt("%.3g", worst_gap) + ", min gap/|M| " + fmt("%.3g", worst_low) + ", duality/|M| " +
                    fmt("%.3g", worst_dual) + ", " + fmt("%.2f", secs) + " s"};
}

Verdict crit_radial_laplacian() {
    const auto t0 = Clock::now();
    const double o1 = bessel_oracle(0, 1.0, 10.0);
    const double o2 = bessel_oracle(1, 10.0, 50.0);
    const double j01 = bessel_zero(0.0, 1), j02 = bessel_zero(0.0, 2);
    const bool oracle_ok = within_rel(o1, 5.7832, 1e-4) && within_rel(o2, 30.471, 1e-4) &&
                           std::abs(o1 - j01 * j01) <= 1e-6 && std::abs(o2 - j02 * j02) <= 1e-5;
    const auto dom = RadialDomain::ball(1.0);
    const EllipticityPair lap(1.0, 1.0);
    const double l1 = principal_eigenvalue_radial(dom, lap, 0.0, Sign::plus, Cone::positive).lambda;
    const double l2 = radial_nodal_eigenvalue(dom, lap, 0.0, Sign::plus, 1).lambda;
    const double secs = seconds_since(t0);
    const bool ok = oracle_ok && within_rel(l1, 5.7832, 0.005) && within_rel(l2, 30.471, 0.005) && secs < 5.0;
    return {ok, "oracle " + fmt("%.7f", o1) + " / " + fmt("%.6f", o2) + ", computed " + fmt("%.7f", l1) + " / " +
                    fmt("%.6f", l2) + ", " + fmt("%.2f", secs) + " s"};
}

Verdict crit_grid_laplacian() {
    const auto t0 = Clock::now();
    const EllipticityPair lap(1.0, 1.0);
    const double j11 = bessel_zero(1.0, 1);
    const bool oracle_ok = within_rel(j11 * j11, 14.682, 1e-4);
    auto pair = [&](const DomainSpec& d) {
        const double c = principal_eigenvalue_grid(Potential(0.0), d, 1.0 / 32, lap, Sign::plus, Cone::positive).lambda;
        const double f = principal_eigenvalue_grid(Potential(0.0), d, 1.0 / 64, lap, Sign::plus, Cone::positive).lambda;
        return richardson(c, f);
    };
    const Richardson disc = pair(DomainSpec::disc(1.0));
    const Richardson half = pair(DomainSpec::cap_disc(1.0, {1.0, 0.0}));
    const double secs = seconds_since(t0);
    const bool ok = oracle_ok && within_rel(disc.fine, 5.7832, 0.02) && within_rel(half.fine, 14.682, 0.02) &&
                    within_rel(half.fine, j11 * j11, 0.02) && secs < 300.0;
    return {ok, "disc " + fmt("%.5f", disc.fine) + " (extrapolated " + fmt("%.5f", disc.extrapolated) + "), half " +
                    fmt("%.5f", half.fine) + " (extrapolated " + fmt("%.5f", half.extrapolated) + "), j11^2 " +
                    fmt("%.6f", j11 * j11) + ", " + fmt("%.1f", secs) + " s"};
}

Verdict crit_shift_invariance() {
    const EllipticityPair ell(1.0, 2.0);
    RadialEigenOptions ro;
    ro.lambda_tol = 1e-11;
    const auto ball = RadialDomain::ball(1.0);
    const double r0 = principal_eigenvalue_radial(ball, ell, 0.0, Sign::plus, Cone::positive, ro).lambda;
    GridPtr g = build_grid(DomainSpec::disc(1.0), 1.0 / 32);
    const double g0 = principal_eigenvalue_grid(Potential(0.0), g, ell, Sign::plus, Cone::positive).lambda;
    double worst_r = 0.0, worst_g = 0.0;
    for (double s : {-3.0, 7.0}) {
        const double rs = principal_eigenvalue_radial(ball, ell, s, Sign::plus, Cone::positive, ro).lambda;
        const double gs = principal_eigenvalue_grid(Potential(s), g, ell, Sign::plus, Cone::positive).lambda;
        worst_r = std::max(worst_r, std::abs(rs - (r0 - s)));
        worst_g = std::max(worst_g, std::abs(gs - (g0 - s)));
    }
    return {worst_r <= 1e-8 && worst_g <= 1e-6,
            "radial deviation " + fmt("%.3g", worst_r) + ", grid deviation " + fmt("%.3g", worst_g)};
}

Verdict crit_fss_calibration() {
    const auto t0 = Clock::now();
    GridPtr g = build_grid(DomainSpec::disc(1.0), 1.0 / 32);
    const DirectionSet dirs = DirectionSet::uniform(16);
    const auto gauss = detect_fss(ScalarField::sample(g, [](Vec2 x) { return std::exp(-4.0 * x.dot(x)); }), dirs);
    const auto x1 = detect_fss(ScalarField::sample(g, [](Vec2 x) { return x.x * (1.0 - x.dot(x)); }), dirs);
    const auto x1x2 = detect_fss(ScalarField::sample(g, [](Vec2 x) { return x.x * x.y * (1.0 - x.dot(x)); }), dirs);
    const double dp = x1.axis_p ? (*x1.axis_p - Vec2{1.0, 0.0}).norm() : 1e300;
    const double secs = seconds_since(t0);
    const bool ok = gauss.classification == FssClass::radial && x1.classification == FssClass::foliated_schwarz &&
                    dp <= 1e-3 && x1x2.classification == FssClass::not_fss && secs < 10.0;
    return {ok, "gaussian " + to_string(gauss.classification) + ", x1 " + to_string(x1.classification) + " |p - e1| " +
                    fmt("%.2g", dp) + ", x1x2 " + to_string(x1x2.classification) + ", " + fmt("%.2f", secs) + " s"};
}

// max over e of the reflection-difference subsolution residual
double reflection_residual(double h, const NonlinearitySpec& nl, const EllipticityPair& ell, const DirectionSet& dirs) {
    const ScalarField u = solve_semilinear_grid(DomainSpec::disc(1.0), h, ell, Sign::plus, nl);
    const ScalarField c = linearized_potential(u, nl);
    double worst = -1e300;
    for (const Vec2& e : dirs.dirs) worst = std::max(worst, subsolution_residual(reflection_gap(u, e).w, c, ell));
    return worst;
}

Verdict crit_reflection_residual() {
    const NonlinearitySpec nl{1.0, 1.0, 2.0, 1.0, 0.0};
    const EllipticityPair ell(1.0, 2.0);
    const DirectionSet dirs = DirectionSet::uniform(8);
    const double r16 = std::max(0.0, reflection_residual(1.0 / 16, nl, ell, dirs));
    const double r32 = std::max(0.0, reflection_residual(1.0 / 32, nl, ell, dirs));
    const double c = r16 * 16.0;
    const bool ok = r32 <= 1.5 * c / 32.0;
    return {ok, "residual h=1/16 " + fmt("%.4g", r16) + ", h=1/32 " + fmt("%.4g", r32) + ", C " + fmt("%.4g", c) +
                    ", bound 1.5 C h " + fmt("%.4g", 1.5 * c / 32.0)};
}

Verdict crit_dominance() {
    const DomainSpec disc = DomainSpec::disc(1.0);
    FamilyOptions opts;
    opts.directions = 4;
    opts.offsets = 5;
    FamilyOptions diametral = opts;
    diametral.offsets = 1;
    bool ok = true;
    std::string detail;
    for (double beta : {1.0, 2.0, 5.0}) {
        const EllipticityPair ell(1.0, beta);
        const auto mu_c = mu2_family_estimate(Potential(0.0), disc, 1.0 / 16, ell, FamilyKind::caps, opts);
        const auto ga_c = gamma2_family_estimate(Potential(0.0), disc, 1.0 / 16, ell, FamilyKind::caps, opts);
        const auto mu_f = mu2_family_estimate(Potential(0.0), disc, 1.0 / 32, ell, FamilyKind::caps, opts);
        const auto ga_f = gamma2_family_estimate(Potential(0.0), disc, 1.0 / 32, ell, FamilyKind::caps, opts);
        const double gap = ga_f.value - mu_f.value;
        const double err = std::abs(gap - (ga_c.value - mu_c.value));
        const bool dominance = ga_f.value >= mu_f.value && ga_c.value >= mu_c.value;
        const bool strict = ell.is_laplacian() ? std::abs(gap) <= 1e-9 * (1.0 + mu_f.value) : gap > 3.0 * err;

        const double tilde = principal_eigenvalue_grid(Potential(0.0), DomainSpec::cap_disc(1.0, {1.0, 0.0}), 1.0 / 32,
                                                       ell, Sign::plus, Cone::positive)
                                 .lambda;
        const double tilde_c = principal_eigenvalue_grid(Potential(0.0), DomainSpec::cap_disc(1.0, {1.0, 0.0}),
                                                         1.0 / 16, ell, Sign::plus, Cone::positive)
                                   .lambda;
        const auto mu_t = mu2_family_estimate(Potential(0.0), disc, 1.0 / 32, ell, FamilyKind::caps, diametral);
        const auto ga_t = gamma2_family_estimate(Potential(0.0), disc, 1.0 / 32, ell, FamilyKind::caps, diametral);
        const double sym_err = std::abs(tilde - tilde_c);
        bool symmetric = std::abs(mu_t.value - tilde) <= 3.0 * sym_err;
        if (ell.is_laplacian()) symmetric = symmetric && std::abs(ga_t.value - tilde) <= 3.0 * sym_err;
        ok = ok && dominance && strict && symmetric;
        if (!detail.empty()) detail += "; ";
        detail += "beta " + fmt("%g", beta) + ": gamma2-mu2 " + fmt("%.4g", gap) + " err " + fmt("%.3g", err) +
                  ", t=0 mu2 " + fmt("%.5g", mu_t.value) + " gamma2 " + fmt("%.5g", ga_t.value) + " tilde " +
                  fmt("%.5g", tilde);
    }
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pucci-spectra acceptance suite"};
    std::vector<int> expected_failures;
    std::vector<int> only;
    app.add_option("--expect-fail", expected_failures, "criteria known to fail; the exit status ignores them");
    app.add_option("--only", only, "run only these criteria");
    CLI11_PARSE(app, argc, argv);

    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "pucci oracle equivalence", crit_pucci_oracle},
        {2, "laplacian limit, radial", crit_radial_laplacian},
        {3, "laplacian limit, grid", crit_grid_laplacian},
        {4, "eigengap", [] { return suites_verdict({"eigengap"}); }},
        {5, "monotonicity and blow-up", [] { return suites_verdict({"monotonicity"}); }},
        {6, "shift invariance", crit_shift_invariance},
        {7, "radial nodal eigenvalue vs half-domain eigenvalue",
         [] {
             const auto t0 = Clock::now();
             Verdict v = suites_verdict({"lame", "radminus"});
             const double secs = seconds_since(t0);
             v.passed = v.passed && secs < 900.0;
             v.detail += ", " + fmt("%.1f", secs) + " s";
             return v;
         }},
        {8, "stable problem is radial", [] { return suites_verdict({"stable"}); }},
        {9, "symmetry detector calibration", crit_fss_calibration},
        {10, "reflection subsolution residual", crit_reflection_residual},
        {11, "doubly symmetric field", [] { return suites_verdict({"doubly-symmetric"}); }},
        {12, "family dominance", crit_dominance},
    };

    const std::set<int> expected(expected_failures.begin(), expected_failures.end());
    const std::set<int> selected(only.begin(), only.end());
    bool consistent = true;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const bool known = expected.count(c.id) != 0;
        if (v.passed == known) consistent = false;
        std::printf("[%s] %2d %s: %s%s\n", v.passed ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                    known ? (v.passed ? " (listed as expected failure)" : " (expected failure)") : "");
        std::fflush(stdout);
    }
    return consistent ? 0 : 1;
}
