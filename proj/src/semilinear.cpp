#include "pucci/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pucci/errors.hpp"
#include "pucci/grid2d.hpp"
#include "pucci/radial_spectra.hpp"

namespace pucci {

void NonlinearitySpec::validate() const {
    if (!(p >= 1.0)) throw InputError("nonlinearity exponent p must be >= 1");
    for (double v : {c0, c1, p, c_p, mu})
        if (!std::isfinite(v)) throw InputError("nonlinearity parameters must be finite");
}

double NonlinearitySpec::f(double u) const {
    double v = c0 + (c1 + mu) * u;
    if (c_p != 0.0) v += c_p * std::pow(std::abs(u), p - 1.0) * u;
    return v;
}

double NonlinearitySpec::df(double u) const {
    double v = c1 + mu;
    if (c_p != 0.0) v += c_p * p * (p == 1.0 ? 1.0 : std::pow(std::abs(u), p - 1.0));
    return v;
}

NonlinearitySpec NonlinearitySpec::constant(double c) { return {c, 0.0, 1.0, 0.0, 0.0}; }
NonlinearitySpec NonlinearitySpec::linear(double slope) { return {0.0, slope, 1.0, 0.0, 0.0}; }
NonlinearitySpec NonlinearitySpec::power(double pp, double cp) { return {0.0, 0.0, pp, cp, 0.0}; }

namespace {

struct Shot {
    double amplitude;
    int changes;  // sign changes including the endpoint
    int interior;
    double end;
    double max_abs;
    bool ok;
};

}  // namespace

RadialProfile solve_semilinear_radial(const RadialDomain& dom, const EllipticityPair& ell, Sign sign,
                                      const NonlinearitySpec& nl, double init_slope, int target_zeros) {
    dom.validate();
    nl.validate();
    if (!(init_slope != 0.0) || !std::isfinite(init_slope)) throw InputError("init_slope must be finite and nonzero");
    if (target_zeros < 0) throw InputError("target_zeros must be >= 0");
    const bool ball = dom.kind == RadialKind::ball;
    const auto source = [&nl](double u) { return nl.f(u); };
    ShootOptions so;
    so.keep_profile = false;

    auto fire = [&](double a) -> Shot {
        try {
            ShootResult r = ball ? shoot_source(dom, ell, sign, source, a, 0.0, so)
                                 : shoot_source(dom, ell, sign, source, 0.0, a, so);
            return {a, r.sign_changes, r.zero_count, r.end_value, r.max_abs, true};
        } catch (const DivergenceError&) {
            return {a, 0, 0, 0.0, 0.0, false};
        }
    };
    auto accept = [&](const Shot& s) {
        return s.ok && s.interior == target_zeros && s.max_abs > 0.0 && std::abs(s.end) <= 1e-7 * s.max_abs;
    };
    auto finish = [&](double a) {
        ShootOptions full;
        ShootResult r = ball ? shoot_source(dom, ell, sign, source, a, 0.0, full)
                             : shoot_source(dom, ell, sign, source, 0.0, a, full);
        return r.profile;
    };

    // Bisect on "at least target_zeros + 1 sign changes" between neighbours
    // of the scan where that predicate flips. The scan with the sign of
    // init_slope comes first, then the opposite sign.
    const auto above = [&](const Shot& s) { return s.changes >= target_zeros + 1; };
    for (double side : {1.0, -1.0}) {
        std::vector<Shot> scan;
        for (int j = -40; j <= 40; ++j) {
            Shot s = fire(side * init_slope * std::ldexp(1.0, j));
            if (accept(s)) return finish(s.amplitude);
            scan.push_back(s);
        }
        for (std::size_t j = 0; j + 1 < scan.size(); ++j) {
            Shot a = scan[j], b = scan[j + 1];
            if (!a.ok || !b.ok || above(a) == above(b)) continue;
            if (!(std::min(a.changes, b.changes) <= target_zeros + 1 && std::max(a.changes, b.changes) >= target_zeros))
                continue;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a.amplitude + b.amplitude);
                Shot m = fire(mid);
                if (!m.ok) break;
                if (accept(m)) return finish(m.amplitude);
                if (above(m) == above(a))
                    a = m;
                else
                    b = m;
                if (std::abs(b.amplitude - a.amplitude) <= 1e-15 * std::abs(mid)) {
                    const Shot& best = std::abs(a.end) < std::abs(b.end) ? a : b;
                    if (best.interior == target_zeros) return finish(best.amplitude);
                    break;
                }
            }
        }
    }
    std::ostringstream os;
    os << "no shooting amplitude gives a solution with " << target_zeros << " interior zeros";
    throw NoSolutionFound(os.str());
}

double semilinear_residual(const ScalarField& u, const EllipticityPair& ell, Sign sign, const NonlinearitySpec& nl) {
    ScalarField m = discrete_pucci(u, ell, sign);
    double r = 0.0;
    for (int i = 0; i < u.size(); ++i) r = std::max(r, std::abs(-m[i] - nl.f(u[i])));
    return r;
}

ScalarField solve_semilinear_grid(const GridPtr& grid, const EllipticityPair& ell, Sign sign,
                                  const NonlinearitySpec& nl, const ScalarField& u0, SemilinearStats* stats) {
    nl.validate();
    if (!grid) throw InputError("null grid");
    const auto n = static_cast<std::size_t>(grid->size());
    ScalarField u(grid);
    if (u0.grid) {
        if (u0.grid == grid)
            u = u0;
        else
            u = transfer(u0, grid);
    }
    SemilinearStats local;
    SemilinearStats& st = stats ? *stats : local;
    st = {};

    auto residual_tol = [&](const ScalarField& v) {
        double fm = 0.0;
        for (int i = 0; i < v.size(); ++i) fm = std::max(fm, std::abs(nl.f(v[i])));
        return 1e-8 * (1.0 + fm);
    };
    double res = semilinear_residual(u, ell, sign, nl);
    st.residual_history.push_back(res);
    constexpr int kMaxIterations = 100;
    for (int it = 1; it <= kMaxIterations && res > residual_tol(u); ++it) {
        std::vector<double> c(n), rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            c[i] = nl.df(u.values[i]);
            rhs[i] = nl.f(u.values[i]) - c[i] * u.values[i];
        }
        DirichletSolver solver(grid, c, 0.0, ell, sign);
        const std::vector<double> target = solver.solve(rhs, u.values);
        ScalarField trial(grid);
        double tau = 1.0;
        double r_trial = 0.0;
        for (;;) {
            for (std::size_t i = 0; i < n; ++i) trial.values[i] = u.values[i] + tau * (target[i] - u.values[i]);
            r_trial = semilinear_residual(trial, ell, sign, nl);
            if (r_trial < res || tau <= 1.0 / 64.0) break;
            tau *= 0.5;
        }
        u = std::move(trial);
        res = r_trial;
        st.iterations = it;
        st.residual_history.push_back(res);
        if (it >= 8 && res >= 0.999 * st.residual_history[static_cast<std::size_t>(it - 8)] && res > residual_tol(u))
            break;
    }
    st.residual = res;
    if (res > residual_tol(u)) {
        std::ostringstream os;
        os << "semilinear iteration stagnated after " << st.iterations << " iterations; residual history:";
        for (double r : st.residual_history) os << ' ' << r;
        throw SolverError(os.str());
    }
    return u;
}

ScalarField solve_semilinear_grid(const DomainSpec& dom, double h, const EllipticityPair& ell, Sign sign,
                                  const NonlinearitySpec& nl, const ScalarField& u0, const StencilConfig& st,
                                  SemilinearStats* stats) {
    return solve_semilinear_grid(build_grid(dom, h, st), ell, sign, nl, u0, stats);
}

RadialProfile linearized_potential(const RadialProfile& u, const NonlinearitySpec& nl) {
    RadialProfile out = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
        out.values[i] = nl.df(u.values[i]);
        out.derivs[i] = 0.0;
        if (nl.c_p != 0.0 && nl.p > 1.0 && u.values[i] != 0.0)
            out.derivs[i] = nl.c_p * nl.p * (nl.p - 1.0) * std::pow(std::abs(u.values[i]), nl.p - 2.0) *
                            (u.values[i] > 0 ? 1.0 : -1.0) * u.derivs[i];
    }
    return out;
}

ScalarField linearized_potential(const ScalarField& u, const NonlinearitySpec& nl) {
    ScalarField out(u.grid);
    for (int i = 0; i < u.size(); ++i) out.values[static_cast<std::size_t>(i)] = nl.df(u[i]);
    return out;
}

}  // namespace pucci
