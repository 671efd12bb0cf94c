#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "harness_internal.hpp"
#include "pucci/errors.hpp"
#include "pucci/harness.hpp"

namespace pucci {

using namespace detail;

namespace {

struct SuiteContext {
    const RunConfig& cfg;
    RunRecord& rec;
    std::vector<EllipticityPair> pairs;
    std::vector<DomainSpec> domains;  // disc and annulus
    StencilConfig st;

    std::string tag(const EllipticityPair& ell, const DomainSpec& d) const {
        return "(" + fmt(ell.alpha) + "," + fmt(ell.beta) + ") " + to_string(d.kind);
    }
};

SuiteContext make_context(const RunConfig& cfg, RunRecord& rec) {
    SuiteContext s{cfg, rec, {}, {}, {static_cast<int>(cfg.integer("grid.directions"))}};
    for (double ratio : cfg.reals("suite.ratios")) s.pairs.emplace_back(1.0, ratio);
    const double R = cfg.real("domain.radius");
    s.domains = {DomainSpec::disc(R), DomainSpec::annulus(cfg.real("domain.inner"), R)};
    return s;
}

DomainSpec half(const DomainSpec& d, Vec2 e) { return d.with_cut(e, 0.0); }

// Pair difference of a - b when both come from the same grids.
double difference_error(const Pair& a, const Pair& b) { return std::abs((a.value - b.value) - (a.coarse - b.coarse)); }

void suite_eigengap(SuiteContext& s) {
    for (const auto& d : s.domains) {
        for (const auto& ell : s.pairs) {
            const std::string t = s.tag(ell, d);
            const Pair p = grid_pair(Potential(0.0), d, s.cfg.h, ell, Sign::plus, Cone::positive, s.st);
            const Pair m = grid_pair(Potential(0.0), d, s.cfg.h, ell, Sign::plus, Cone::negative, s.st);
            s.rec.add("lambda1_plus " + t, p.value, p.error);
            s.rec.add("lambda1_minus " + t, m.value, m.error);
            const double gap = m.value - p.value, err = difference_error(m, p);
            if (ell.is_laplacian()) {
                s.rec.check("eigengap equal " + t, std::abs(gap) <= 3.0 * err + 1e-9 * (1.0 + p.value), gap, err,
                            "alpha = beta: lambda1_minus = lambda1_plus");
            } else {
                s.rec.check_margin("eigengap " + t, gap, err, "lambda1_minus - lambda1_plus > 3 error");
            }
        }
    }
}

void suite_monotonicity(SuiteContext& s) {
    const Vec2 dirs[] = {{1.0, 0.0}, unit_at_angle(std::numbers::pi / 4.0)};
    for (const auto& d : s.domains) {
        for (const auto& ell : s.pairs) {
            const std::string t = s.tag(ell, d);
            const Pair full = grid_pair(Potential(0.0), d, s.cfg.h, ell, Sign::plus, Cone::positive, s.st);
            s.rec.add("lambda1_plus " + t, full.value, full.error);
            for (const Vec2 e : dirs) {
                const Pair cap = grid_pair(Potential(0.0), half(d, e), s.cfg.h, ell, Sign::plus, Cone::positive, s.st);
                const std::string n = t + " cap e=(" + fmt(e.x) + "," + fmt(e.y) + ")";
                s.rec.add("lambda1_plus " + n, cap.value, cap.error);
                s.rec.check_margin("monotone " + n, cap.value - full.value, difference_error(cap, full),
                                   "lambda1_plus(cap) > lambda1_plus(full)");
            }
        }
    }
    const double R = s.cfg.real("domain.radius");
    for (const auto& ell : s.pairs) {
        const Pair thick = radial_pair(RadialDomain::annulus(0.5 * R, R), ell, 0.0, Sign::plus, Cone::positive);
        const Pair thin = radial_pair(RadialDomain::annulus(0.95 * R, R), ell, 0.0, Sign::plus, Cone::positive);
        const std::string t = "(" + fmt(ell.alpha) + "," + fmt(ell.beta) + ")";
        s.rec.add("lambda1_plus annulus eps=0.5 " + t, thick.value, thick.error);
        s.rec.add("lambda1_plus annulus eps=0.05 " + t, thin.value, thin.error);
        s.rec.check_margin("blow-up " + t, thin.value - 10.0 * thick.value, thin.error + 10.0 * thick.error,
                           "lambda1_plus(eps=0.05) > 10 lambda1_plus(eps=0.5)");
    }
}

void suite_lame(SuiteContext& s) {
    for (const auto& d : s.domains) {
        for (const auto& ell : s.pairs) {
            const std::string t = s.tag(ell, d);
            const Pair r2 = radial_nodal_pair(radial_domain_of(d), ell, 0.0, Sign::plus, 1);
            const Pair lt =
                grid_pair(Potential(0.0), half(d, {1.0, 0.0}), s.cfg.h, ell, Sign::plus, Cone::positive, s.st);
            s.rec.add("lambda2_radial " + t, r2.value, r2.error);
            s.rec.add("lambda1_plus_half " + t, lt.value, lt.error);
            s.rec.add("lambda1_plus_half_extrapolated " + t, lt.extrapolated, lt.error);
            s.rec.check_margin("lame " + t, r2.value - lt.value, r2.error + lt.error,
                               "lambda2_radial - lambda1_plus(half) > 3 error");
        }
    }
}

void suite_radminus(SuiteContext& s) {
    const DirectionSet dirs = DirectionSet::uniform(8);
    for (const auto& d : s.domains) {
        for (const auto& ell : s.pairs) {
            const std::string t = s.tag(ell, d);
            const Pair r2 = radial_nodal_pair(radial_domain_of(d), ell, 0.0, Sign::plus, 1);
            s.rec.add("lambda2_radial " + t, r2.value, r2.error);
            // Linearized potential of phi_2 for f(u) = lambda2 u, on the full grid.
            GridPtr g = build_grid(d, s.cfg.h, s.st);
            const ScalarField phi = sample_radial_profile(r2.fine.profile(), g);
            const NonlinearitySpec nl = NonlinearitySpec::linear(r2.value);
            const Potential pot(linearized_potential(phi, nl));
            const NodalReport nr = nodal_analysis(phi);
            s.rec.check("radial phi2 two regions " + t, nr.num_nodal_regions == 2, nr.num_nodal_regions, 0.0);
            double worst = -std::numeric_limits<double>::infinity(), worst_err = 0.0;
            for (const Vec2 e : dirs.dirs) {
                const DomainSpec hd = half(d, e);
                const auto fine =
                    principal_eigenvalue_grid(pot, build_grid(hd, s.cfg.h, s.st), ell, Sign::plus, Cone::positive);
                const auto zero = principal_eigenvalue_grid(Potential(0.0), build_grid(hd, s.cfg.h, s.st), ell,
                                                            Sign::plus, Cone::positive);
                const auto coarse = principal_eigenvalue_grid(Potential(r2.value), hd, 2.0 * s.cfg.h, ell, Sign::plus,
                                                              Cone::positive, s.st);
                const double err = std::abs(fine.lambda - coarse.lambda) + r2.error;
                const double shift_dev = std::abs(fine.lambda - (zero.lambda - r2.value));
                if (fine.lambda > worst) {
                    worst = fine.lambda;
                    worst_err = err;
                }
                const std::string n = t + " e=(" + fmt(e.x) + "," + fmt(e.y) + ")";
                s.rec.check("shift identity " + n, shift_dev <= 1e-6 * (1.0 + std::abs(zero.lambda)), shift_dev,
                            1e-6 * (1.0 + std::abs(zero.lambda)));
            }
            s.rec.add("max_e lambda1_plus(L_u, B(e)) " + t, worst, worst_err);
            s.rec.check_margin("radminus " + t, -worst, worst_err, "lambda1_plus(M+ + lambda2_radial, B(e)) < 0");
        }
    }
}

struct SolvedProblem {
    ScalarField u;
    ScalarField fprime;
    NonlinearitySpec nl;
};

SolvedProblem solve_problem(const DomainSpec& d, double h, const EllipticityPair& ell, const NonlinearitySpec& nl,
                            const StencilConfig& st) {
    GridPtr g = build_grid(d, h, st);
    SolvedProblem p{solve_semilinear_grid(g, ell, Sign::plus, nl), {}, nl};
    p.fprime = linearized_potential(p.u, nl);
    return p;
}

void suite_stable(SuiteContext& s) {
    // Default: forcing of both signs, so that both ellipticity branches carry the solution.
    std::vector<NonlinearitySpec> problems;
    if (s.cfg.nl)
        problems.push_back(*s.cfg.nl);
    else
        problems = {{1.0, 0.1, 1.0, 0.0, 0.0}, {-1.0, 0.1, 1.0, 0.0, 0.0}};
    s.rec.reports["nonlinearity"] = nlohmann::json::array();
    for (const auto& nl : problems) s.rec.reports["nonlinearity"].push_back(to_json(nl));
    const DomainSpec d = s.domains.front();
    const double h = s.cfg.h;
    for (const auto& nl : problems)
        for (const auto& ell : s.pairs) {
            const std::string t = s.tag(ell, d) + " c0=" + fmt(nl.c0);
            const SolvedProblem fine = solve_problem(d, h, ell, nl, s.st);
            const SolvedProblem coarse = solve_problem(d, 2.0 * h, ell, nl, s.st);
            const auto lf =
                principal_eigenvalue_grid(Potential(fine.fprime), fine.u.grid, ell, Sign::plus, Cone::positive);
            const auto lc =
                principal_eigenvalue_grid(Potential(coarse.fprime), coarse.u.grid, ell, Sign::plus, Cone::positive);
            const double err = std::abs(lf.lambda - lc.lambda);
            s.rec.add("lambda1_plus(L_u, B) " + t, lf.lambda, err);
            s.rec.check_margin("stability hypothesis " + t, lf.lambda, err, "lambda1_plus(L_u, B) > 0");
            const FssReport fr =
                detect_fss(fine.u, DirectionSet::uniform(static_cast<int>(s.cfg.integer("symmetry.directions"))));
            s.rec.reports["fss " + t] = to_json(fr);
            s.rec.check("radial " + t, fr.classification == FssClass::radial, fr.max_violation, fr.tol,
                        "detect_fss = " + to_string(fr.classification));
            const double ut = angular_derivative(fine.u).sup_norm();
            s.rec.add("angular_derivative_max " + t, ut, 10.0 * h * h);
            s.rec.check("angular derivative " + t, ut <= 10.0 * h * h, 10.0 * h * h - ut, 0.0,
                        "max |u_theta| <= 10 h^2");
            try {
                const RadialProfile rp = solve_semilinear_radial(radial_domain_of(d), ell, Sign::plus, nl, 1.0, 0);
                const double ug = interpolate(fine.u, {0.0, 0.0});
                s.rec.add("u(0) grid " + t, ug, std::abs(ug - interpolate(coarse.u, {0.0, 0.0})));
                s.rec.add("u(0) radial " + t, rp.values.front());
                const double rel = std::abs(ug - rp.values.front()) / std::abs(rp.values.front());
                s.rec.check("radial/grid agreement " + t, rel <= 0.01, 0.01 - rel, 0.0, "relative difference <= 1%");
            } catch (const NoSolutionFound& e) {
                s.rec.notes.push_back(std::string("radial cross-check skipped: ") + e.what());
            }
        }
}

void suite_fss_convex(SuiteContext& s) {
    const NonlinearitySpec nl = s.cfg.nl ? *s.cfg.nl : NonlinearitySpec{1.0, 1.0, 2.0, 1.0, 0.0};
    s.rec.reports["nonlinearity"] = to_json(nl);
    s.rec.check("convex nonlinearity", nl.is_convex(), nl.c_p, 0.0);
    const DirectionSet dirs = DirectionSet::uniform(8);
    const double h = s.cfg.h;
    for (const auto& d : s.domains) {
        for (const auto& ell : s.pairs) {
            const std::string t = s.tag(ell, d);
            const SolvedProblem fine = solve_problem(d, h, ell, nl, s.st);
            const SolvedProblem coarse = solve_problem(d, 2.0 * h, ell, nl, s.st);
            double worst = std::numeric_limits<double>::infinity(), worst_err = 0.0;
            for (const Vec2 e : dirs.dirs) {
                const DomainSpec hd = half(d, e);
                const auto lf = principal_eigenvalue_grid(Potential(fine.fprime), build_grid(hd, h, s.st), ell,
                                                          Sign::plus, Cone::positive);
                const auto lc = principal_eigenvalue_grid(Potential(coarse.fprime), build_grid(hd, 2.0 * h, s.st), ell,
                                                          Sign::plus, Cone::positive);
                if (lf.lambda < worst) {
                    worst = lf.lambda;
                    worst_err = std::abs(lf.lambda - lc.lambda);
                }
            }
            s.rec.add("min_e lambda1_plus(L_u, B(e)) " + t, worst, worst_err);
            const bool hypothesis = worst > -3.0 * worst_err;
            s.rec.check("half-domain hypothesis " + t, hypothesis, worst, worst_err,
                        "lambda1_plus(L_u, B(e)) >= 0 for sampled e");
            const FssReport fr =
                detect_fss(fine.u, DirectionSet::uniform(static_cast<int>(s.cfg.integer("symmetry.directions"))));
            s.rec.reports["fss " + t] = to_json(fr);
            s.rec.check("foliated Schwarz " + t, fr.classification != FssClass::not_fss, fr.max_violation, fr.tol,
                        "detect_fss = " + to_string(fr.classification));
        }
    }
}

void suite_doubly_symmetric(SuiteContext& s) {
    const double a = s.cfg.real("domain.a");
    const DomainSpec sq = DomainSpec::rectangle(a, a);
    const double h = s.cfg.h;
    const double pi = std::numbers::pi;
    const double lambda = 10.0 * pi * pi / (4.0 * a * a);
    const EllipticityPair lap(1.0, 1.0);
    GridPtr g = build_grid(sq, h, s.st);
    const ScalarField u = ScalarField::sample(g, [a](Vec2 x) { return doubly_symmetric_field(a, a, x); });
    s.rec.snapshots.push_back({"doubly_symmetric", u});
    const NodalReport nr = nodal_analysis(u);
    s.rec.reports["nodal"] = to_json(nr);
    s.rec.check("two nodal regions", nr.num_nodal_regions == 2, nr.num_nodal_regions, 0.0);
    s.rec.check("nodal set avoids boundary", !nr.touches_boundary, 0.0, 0.0);
    s.rec.check("nodal set avoids origin", !nr.contains_origin, 0.0, 0.0);
    const NonlinearitySpec nl = NonlinearitySpec::linear(lambda);
    const Potential pot(linearized_potential(u, nl));
    const Vec2 halves[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const Vec2 e : halves) {
        const DomainSpec hd = sq.with_cut(e, 0.0);
        const auto lf = principal_eigenvalue_grid(pot, build_grid(hd, h, s.st), lap, Sign::plus, Cone::positive);
        const auto lc =
            principal_eigenvalue_grid(Potential(lambda), hd, 2.0 * h, lap, Sign::plus, Cone::positive, s.st);
        const double err = std::abs(lf.lambda - lc.lambda);
        const std::string n = "e=(" + fmt(e.x) + "," + fmt(e.y) + ")";
        s.rec.add("lambda1_plus(L_u, half) " + n, lf.lambda, err);
        s.rec.check_margin("negative half-domain eigenvalue " + n, -lf.lambda, err, "lambda1_plus(L_u, Omega(e)) < 0");
    }
}

void suite_pis(SuiteContext& s) {
    const DomainSpec d = s.domains.front();
    const double h = s.cfg.h;
    const DirectionSet dirs = DirectionSet::uniform(static_cast<int>(s.cfg.integer("symmetry.directions")));
    for (const auto& ell : s.pairs) {
        const std::string t = s.tag(ell, d);
        const DomainSpec hd = half(d, {1.0, 0.0});
        const auto tilde =
            principal_eigenvalue_grid(Potential(0.0), build_grid(hd, h, s.st), ell, Sign::plus, Cone::positive);
        s.rec.add("lambda1_plus_half " + t, tilde.lambda, tilde.lambda_hi - tilde.lambda_lo);
        // Seed: odd reflection of the half-disc eigenfunction.
        GridPtr g = build_grid(d, h, s.st);
        const ScalarField& phi = tilde.field();
        const ScalarField seed = ScalarField::sample(g, [&](Vec2 x) {
            if (x.x > 0.0) return interpolate(phi, x);
            if (x.x < 0.0) return -interpolate(phi, reflect(x, {1.0, 0.0}));
            return 0.0;
        });
        const RefineOutcome out = nodal_candidate_refine(tilde.lambda, seed, Potential(0.0), ell, Sign::plus);
        s.rec.diagnostics["refine " + t] = {
            {"converged", out.converged}, {"message", out.message}, {"residual_history", out.residual_history}};
        const double lam = out.result.lambda;
        if (out.converged) s.rec.add("nodal_eigenvalue_found " + t, lam, out.result.residual);
        // The statement assumes lambda1_plus(half) itself is a nodal eigenvalue.
        const double near_tol = 1e-3 * tilde.lambda;
        if (!out.converged || std::abs(lam - tilde.lambda) > near_tol) {
            Assertion a{"nodal candidate " + t,
                        false,
                        std::abs(lam - tilde.lambda),
                        near_tol,
                        out.converged ? "refinement converged to " + fmt(lam) + ", not to lambda1_plus(half) = " +
                                            fmt(tilde.lambda) + "; hypothesis not met, skipped"
                                      : "refinement did not converge; skipped",
                        true};
            s.rec.assertions.push_back(a);
            s.rec.notes.push_back("pis-properties " + t + ": " + a.detail);
            continue;
        }
        const ScalarField& psi = out.result.field();
        s.rec.snapshots.push_back({"psi2_beta" + fmt(ell.beta), psi});
        const FssReport fr = detect_fss(psi, dirs);
        const NodalReport nr = nodal_analysis(psi);
        s.rec.reports["fss " + t] = to_json(fr);
        s.rec.reports["nodal " + t] = to_json(nr);
        s.rec.check("psi2 not radial " + t, fr.classification != FssClass::radial, 0.0, 0.0);
        s.rec.check("psi2 foliated Schwarz " + t, fr.classification == FssClass::foliated_schwarz, fr.max_violation,
                    fr.tol);
        s.rec.check("psi2 nodal set touches boundary " + t, nr.touches_boundary, 0.0, 0.0);
        if (!ell.is_laplacian() && fr.axis_p) {
            // Nodes whose sign disagrees with the half disc B(p).
            const Vec2 p = *fr.axis_p;
            int mismatch = 0;
            for (int k = 0; k < psi.size(); ++k) {
                const double side = psi.grid->node(k).pos.dot(p);
                if ((psi[k] > nr.zero_band && side < -h) || (psi[k] < -nr.zero_band && side > h)) ++mismatch;
            }
            s.rec.add("positive set outside B(p) nodes " + t, mismatch);
            s.rec.check("positive nodal region differs from a half disc " + t, mismatch > 0, mismatch, 0.0);
        }
    }
}

}  // namespace

RunRecord verify_paper_suite(const std::string& name, const RunConfig& cfg) {
    RunRecord rec;
    rec.experiment = "verify-paper";
    rec.config = cfg.params.values();
    rec.diagnostics["suite"] = name;
    SuiteContext s = make_context(cfg, rec);
    const auto start = std::chrono::steady_clock::now();
    try {
        if (name == "eigengap")
            suite_eigengap(s);
        else if (name == "monotonicity")
            suite_monotonicity(s);
        else if (name == "lame")
            suite_lame(s);
        else if (name == "radminus")
            suite_radminus(s);
        else if (name == "stable")
            suite_stable(s);
        else if (name == "fss-convex")
            suite_fss_convex(s);
        else if (name == "doubly-symmetric")
            suite_doubly_symmetric(s);
        else if (name == "pis-properties")
            suite_pis(s);
        else
            throw ConfigError({"unknown suite '" + name + "'"});
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        rec.status = exit_solver;
        rec.message = e.what();
    }
    rec.timings_ms["suite"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (rec.status == exit_ok && !rec.all_passed()) rec.status = exit_assertion;
    return rec;
}

}  // namespace pucci
