#include "pucci/grid2d.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pucci/errors.hpp"

namespace pucci {

std::vector<double> Potential::values_on(const Grid2D& g) const {
    std::vector<double> v;
    if (field_) {
        if (field_->grid.get() == &g)
            v = field_->values;
        else
            v = restrict_to(*field_, g);
        for (double& x : v) x += constant_;
    } else {
        v.assign(static_cast<std::size_t>(g.size()), constant_);
    }
    return v;
}

Potential Potential::shifted(double s) const {
    Potential p = *this;
    p.constant_ += s;
    return p;
}

namespace {

struct ArmWeights {
    double plus, center, minus;  // coefficients of u+, u0, u- in the second difference
};

inline ArmWeights arm_weights(const Grid2D& g, const StencilArm& a, int k) {
    const double len = g.directions()[static_cast<std::size_t>(k)].length * g.h();
    const double inv = 2.0 / (len * len);
    const double sp = a.s_plus, sm = a.s_minus;
    return {inv / (sp * (sp + sm)), -inv / (sp * sm), inv / (sm * (sp + sm))};
}

inline double second_difference(const Grid2D& g, std::span<const double> u, int node, int k) {
    const StencilArm& a = g.arm(node, k);
    const ArmWeights w = arm_weights(g, a, k);
    const double up = a.plus >= 0 ? u[static_cast<std::size_t>(a.plus)] : 0.0;
    const double um = a.minus >= 0 ? u[static_cast<std::size_t>(a.minus)] : 0.0;
    return w.plus * up + w.center * u[static_cast<std::size_t>(node)] + w.minus * um;
}

void check_length(const Grid2D& g, std::size_t n) {
    if (n != static_cast<std::size_t>(g.size())) throw InputError("vector length does not match grid");
}

}  // namespace

double directional_second_difference(const Grid2D& g, std::span<const double> u, int node, int k) {
    return second_difference(g, u, node, k);
}

void discrete_pucci(const Grid2D& g, std::span<const double> u, const EllipticityPair& ell, Sign sign,
                    std::span<double> out) {
    check_length(g, u.size());
    check_length(g, out.size());
    const int nd = g.num_directions();
    for (int i = 0; i < g.size(); ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        double mn = std::numeric_limits<double>::infinity();
        for (int k = 0; k < nd; ++k) {
            const double d = second_difference(g, u, i, k);
            mx = std::max(mx, d);
            mn = std::min(mn, d);
        }
        out[static_cast<std::size_t>(i)] = pucci_weight(mx, ell, sign) * mx + pucci_weight(mn, ell, sign) * mn;
    }
}

ScalarField discrete_pucci(const ScalarField& u, const EllipticityPair& ell, Sign sign) {
    ScalarField out(u.grid);
    discrete_pucci(*u.grid, u.values, ell, sign, out.values);
    return out;
}

namespace {

// Policy with hysteresis: near-ties keep the reference choice so that a
// converged iterate does not trigger refactorization on rounding noise.
std::vector<NodePolicy> policy_with_reference(const Grid2D& g, std::span<const double> u, const EllipticityPair& ell,
                                              Sign sign, const std::vector<NodePolicy>* ref) {
    const int nd = g.num_directions();
    std::vector<NodePolicy> pol(static_cast<std::size_t>(g.size()));
    std::vector<double> d(static_cast<std::size_t>(nd));
    for (int i = 0; i < g.size(); ++i) {
        int kmax = 0, kmin = 0;
        double scale = 0.0;
        for (int k = 0; k < nd; ++k) {
            d[static_cast<std::size_t>(k)] = second_difference(g, u, i, k);
            scale = std::max(scale, std::abs(d[static_cast<std::size_t>(k)]));
            if (d[static_cast<std::size_t>(k)] > d[static_cast<std::size_t>(kmax)]) kmax = k;
            if (d[static_cast<std::size_t>(k)] < d[static_cast<std::size_t>(kmin)]) kmin = k;
        }
        NodePolicy p;
        p.kmax = kmax;
        p.kmin = kmin;
        p.wmax = pucci_weight(d[static_cast<std::size_t>(kmax)], ell, sign);
        p.wmin = pucci_weight(d[static_cast<std::size_t>(kmin)], ell, sign);
        if (ref != nullptr) {
            const NodePolicy& r = (*ref)[static_cast<std::size_t>(i)];
            const double tie = 1e-11 * scale;
            const double dmax = d[static_cast<std::size_t>(kmax)];
            const double dmin = d[static_cast<std::size_t>(kmin)];
            if (d[static_cast<std::size_t>(r.kmax)] >= dmax - tie) p.kmax = r.kmax;
            if (d[static_cast<std::size_t>(r.kmin)] <= dmin + tie) p.kmin = r.kmin;
            if (std::abs(d[static_cast<std::size_t>(p.kmax)]) <= tie)
                p.wmax = r.wmax;
            else
                p.wmax = pucci_weight(d[static_cast<std::size_t>(p.kmax)], ell, sign);
            if (std::abs(d[static_cast<std::size_t>(p.kmin)]) <= tie)
                p.wmin = r.wmin;
            else
                p.wmin = pucci_weight(d[static_cast<std::size_t>(p.kmin)], ell, sign);
        }
        pol[static_cast<std::size_t>(i)] = p;
    }
    return pol;
}

using SpMat = Eigen::SparseMatrix<double>;

// Matrix of -M_P - c + shift for a frozen policy P.
SpMat assemble(const Grid2D& g, const std::vector<NodePolicy>& pol, std::span<const double> c, double shift) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(g.size()) * 5);
    for (int i = 0; i < g.size(); ++i) {
        const NodePolicy& p = pol[static_cast<std::size_t>(i)];
        double diag = shift - c[static_cast<std::size_t>(i)];
        const int ks[2] = {p.kmax, p.kmin};
        const double ws[2] = {p.wmax, p.wmin};
        for (int t = 0; t < 2; ++t) {
            const StencilArm& a = g.arm(i, ks[t]);
            const ArmWeights w = arm_weights(g, a, ks[t]);
            diag -= ws[t] * w.center;
            if (a.plus >= 0) trip.emplace_back(i, a.plus, -ws[t] * w.plus);
            if (a.minus >= 0) trip.emplace_back(i, a.minus, -ws[t] * w.minus);
        }
        trip.emplace_back(i, i, diag);
    }
    SpMat m(g.size(), g.size());
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

double sup_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

std::vector<NodePolicy> extract_policy(const Grid2D& g, std::span<const double> u, const EllipticityPair& ell,
                                       Sign sign) {
    check_length(g, u.size());
    return policy_with_reference(g, u, ell, sign, nullptr);
}

struct DirichletSolver::Impl {
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    std::vector<NodePolicy> policy;
    bool have_factor = false;
};

DirichletSolver::DirichletSolver(GridPtr grid, std::vector<double> c, double shift, const EllipticityPair& ell,
                                 Sign sign)
    : grid_(std::move(grid)), c_(std::move(c)), shift_(shift), ell_(ell), sign_(sign), impl_(std::make_unique<Impl>()) {
    check_length(*grid_, c_.size());
}

DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;
DirichletSolver& DirichletSolver::operator=(DirichletSolver&&) noexcept = default;

std::vector<double> DirichletSolver::residual(std::span<const double> u, std::span<const double> rhs) const {
    const Grid2D& g = *grid_;
    std::vector<double> r(u.size());
    discrete_pucci(g, u, ell_, sign_, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = -r[i] + (shift_ - c_[i]) * u[i] - rhs[i];
    return r;
}

std::vector<double> DirichletSolver::solve(std::span<const double> rhs, std::span<const double> initial) {
    const Grid2D& g = *grid_;
    check_length(g, rhs.size());
    const auto n = static_cast<std::size_t>(g.size());
    std::vector<double> u(n, 0.0);
    if (!initial.empty()) {
        check_length(g, initial.size());
        u.assign(initial.begin(), initial.end());
    }
    const double tol = 1e-10 * (1.0 + sup_abs(rhs));
    stats_ = {};

    auto factor = [&](const std::vector<NodePolicy>& pol) {
        impl_->lu.compute(assemble(g, pol, c_, shift_));
        if (impl_->lu.info() != Eigen::Success) {
            impl_->have_factor = false;
            throw SolverError("frozen-policy matrix is singular (shift too small?)");
        }
        impl_->policy = pol;
        impl_->have_factor = true;
        ++stats_.factorizations;
    };
    auto linear_solve = [&](std::span<const double> b) {
        Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
        Eigen::VectorXd x = impl_->lu.solve(bv);
        return std::vector<double>(x.data(), x.data() + x.size());
    };

    bool started = !initial.empty();
    double r_cur = started ? sup_abs(residual(u, rhs)) : std::numeric_limits<double>::infinity();
    if (started && r_cur <= tol) {
        stats_.residual = r_cur;
        return u;
    }
    for (int round = 0; round < 200; ++round) {
        ++stats_.policy_rounds;
        auto pol = policy_with_reference(g, u, ell_, sign_, impl_->have_factor ? &impl_->policy : nullptr);
        if (!impl_->have_factor || pol != impl_->policy) factor(pol);
        std::vector<double> next = linear_solve(rhs);
        double r_next = sup_abs(residual(next, rhs));
        if (r_next <= tol) {
            stats_.residual = r_next;
            return next;
        }
        if (std::isfinite(r_cur) && r_next >= r_cur) {
            // Backtrack along the Newton direction.
            for (double tau = 0.5; tau >= 1.0 / 64.0; tau *= 0.5) {
                std::vector<double> trial(n);
                for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + tau * (next[i] - u[i]);
                const double r_trial = sup_abs(residual(trial, rhs));
                if (r_trial < r_cur) {
                    next = std::move(trial);
                    r_next = r_trial;
                    break;
                }
            }
        }
        u = std::move(next);
        r_cur = r_next;
    }
    std::ostringstream os;
    os << "policy iteration did not converge in 200 rounds; residual " << r_cur << " > " << tol << " ("
       << stats_.factorizations << " factorizations)";
    throw SolverError(os.str());
}

ScalarField solve_dirichlet(const ScalarField& c, double shift, const ScalarField& rhs, const EllipticityPair& ell,
                            Sign sign) {
    if (c.grid != rhs.grid) throw InputError("c and rhs must share a grid");
    DirichletSolver solver(rhs.grid, c.values, shift, ell, sign);
    return ScalarField(rhs.grid, solver.solve(rhs.values));
}

double eigen_residual(const ScalarField& phi, const std::vector<double>& c, double lambda, const EllipticityPair& ell,
                      Sign sign) {
    ScalarField m = discrete_pucci(phi, ell, sign);
    double r = 0.0;
    for (int i = 0; i < phi.size(); ++i)
        r = std::max(r, std::abs(-m[i] - c[static_cast<std::size_t>(i)] * phi[i] - lambda * phi[i]));
    return r;
}

namespace {

EigenResult positive_cone_iteration(const std::vector<double>& c, const GridPtr& grid, const EllipticityPair& ell,
                                    Sign sign, const GridEigenOptions& opts) {
    const auto n = static_cast<std::size_t>(grid->size());
    const double cmax = *std::max_element(c.begin(), c.end());
    double shift = cmax + 1.0;
    for (int attempt = 0; attempt < 4; ++attempt, shift = cmax + 10.0 * (shift - cmax)) {
        try {
            DirichletSolver solver(grid, c, shift, ell, sign);
            std::vector<double> u(n, 1.0);
            double lo = -std::numeric_limits<double>::infinity();
            double hi = std::numeric_limits<double>::infinity();
            for (int it = 1; it <= opts.max_iterations; ++it) {
                std::vector<double> v = solver.solve(u, u);
                double rmin = std::numeric_limits<double>::infinity();
                double rmax = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < n; ++i) {
                    if (!(v[i] > 0.0)) throw SolverError("resolvent lost positivity");
                    const double ratio = u[i] / v[i];
                    rmin = std::min(rmin, ratio);
                    rmax = std::max(rmax, ratio);
                }
                lo = rmin - shift;
                hi = rmax - shift;
                const double vmax = sup_abs(v);
                for (std::size_t i = 0; i < n; ++i) u[i] = v[i] / vmax;
                const double mid = 0.5 * (lo + hi);
                // Measured on lambda + max(c) so that constant shifts of c give
                // identical iterations.
                if (hi - lo <= opts.rel_tol * (1.0 + std::abs(mid + cmax))) {
                    EigenResult res;
                    res.lambda = mid;
                    res.lambda_lo = lo;
                    res.lambda_hi = hi;
                    res.iterations = it;
                    res.cone = Cone::positive;
                    res.zero_count = 0;
                    ScalarField phi(grid, u);
                    res.residual = eigen_residual(phi, c, mid, ell, sign);
                    res.eigenfunction = std::move(phi);
                    return res;
                }
            }
            std::ostringstream os;
            os << "Collatz-Wielandt bracket [" << lo << ", " << hi << "] did not close in " << opts.max_iterations
               << " iterations";
            throw EigenError(os.str());
        } catch (const SolverError&) {
            if (attempt == 3) throw;
        }
    }
    throw EigenError("unreachable");
}

}  // namespace

EigenResult principal_eigenvalue_grid(const Potential& c, const GridPtr& grid, const EllipticityPair& ell, Sign sign,
                                      Cone cone, const GridEigenOptions& opts) {
    const std::vector<double> cv = c.values_on(*grid);
    if (cone == Cone::positive) return positive_cone_iteration(cv, grid, ell, sign, opts);
    EigenResult r = positive_cone_iteration(cv, grid, ell, opposite(sign), opts);
    auto& f = std::get<ScalarField>(r.eigenfunction);
    for (double& v : f.values) v = -v;
    r.cone = Cone::negative;
    r.residual = eigen_residual(f, cv, r.lambda, ell, sign);
    return r;
}

EigenResult principal_eigenvalue_grid(const Potential& c, const DomainSpec& dom, double h, const EllipticityPair& ell,
                                      Sign sign, Cone cone, const StencilConfig& st, const GridEigenOptions& opts) {
    return principal_eigenvalue_grid(c, build_grid(dom, h, st), ell, sign, cone, opts);
}

RefineOutcome nodal_candidate_refine(double lambda0, const ScalarField& psi0, const Potential& c,
                                     const EllipticityPair& ell, Sign sign, const RefineOptions& opts) {
    const Grid2D& g = *psi0.grid;
    const auto n = static_cast<std::size_t>(g.size());
    const std::vector<double> cv = c.values_on(g);
    RefineOutcome out;

    std::vector<double> psi = psi0.values;
    double smax = sup_abs(psi);
    if (!(smax > 0.0)) {
        out.message = "initial field is zero";
        return out;
    }
    for (double& v : psi) v /= smax;
    double lambda = lambda0;
    auto make_result = [&](int steps, double res) {
        EigenResult r;
        r.lambda = lambda;
        r.lambda_lo = r.lambda_hi = lambda;
        r.iterations = steps;
        r.residual = res;
        ScalarField f(psi0.grid, psi);
        int regions = 0;
        label_sign_regions(f, 1e-3 * f.sup_norm(), regions);
        r.zero_count = std::max(0, regions - 1);
        double mx = f.max(), mn = f.min();
        r.cone = mx >= -mn ? Cone::positive : Cone::negative;
        r.eigenfunction = std::move(f);
        return r;
    };

    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    for (int step = 0; step <= opts.max_steps; ++step) {
        ScalarField f(psi0.grid, psi);
        const double res = eigen_residual(f, cv, lambda, ell, sign);
        out.residual_history.push_back(res);
        if (!std::isfinite(res) || !std::isfinite(lambda)) {
            out.message = "iteration produced non-finite values";
            out.result = make_result(step, res);
            return out;
        }
        if (res <= opts.tol * (1.0 + std::abs(lambda))) {
            out.converged = true;
            out.message = "converged";
            out.result = make_result(step, res);
            return out;
        }
        if (step == opts.max_steps) break;

        std::size_t istar = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(psi[i]) > std::abs(psi[istar])) istar = i;

        // Newton step on the bordered system reduces to
        // psi_new = dl * A^{-1} psi with A = J_P - c - lambda, dl = psi(i*) / (A^{-1} psi)(i*).
        const auto pol = policy_with_reference(g, psi, ell, sign, nullptr);
        double shift = -lambda;
        std::vector<double> y;
        for (int tries = 0; tries < 3; ++tries) {
            lu.compute(assemble(g, pol, cv, shift));
            if (lu.info() == Eigen::Success) {
                Eigen::Map<const Eigen::VectorXd> b(psi.data(), static_cast<Eigen::Index>(n));
                Eigen::VectorXd x = lu.solve(b);
                if (x.allFinite()) {
                    y.assign(x.data(), x.data() + x.size());
                    break;
                }
            }
            shift -= 1e-10 * (1.0 + std::abs(lambda));
        }
        if (y.empty() || y[istar] == 0.0) {
            out.message = "singular Newton system";
            out.result = make_result(step, res);
            return out;
        }
        double dl = psi[istar] / y[istar];
        const double cap = 0.5 * (1.0 + std::abs(lambda));
        const double scale = dl;
        dl = std::clamp(dl, -cap, cap);
        lambda += dl;
        for (std::size_t i = 0; i < n; ++i) psi[i] = scale * y[i];
        const double m = sup_abs(psi);
        for (double& v : psi) v /= m;
    }
    std::ostringstream os;
    os << "no convergence in " << opts.max_steps << " steps; last residual " << out.residual_history.back();
    out.message = os.str();
    out.result = make_result(opts.max_steps, out.residual_history.back());
    return out;
}

Richardson richardson(double coarse, double fine, double order) {
    Richardson r;
    r.coarse = coarse;
    r.fine = fine;
    r.extrapolated = fine + (fine - coarse) / (std::pow(2.0, order) - 1.0);
    r.error = std::abs(fine - coarse);
    return r;
}

}  // namespace pucci
