#include "pucci/radial_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pucci/errors.hpp"

namespace pucci {

namespace {
constexpr double kJ01Squared = 5.783185962946784;  // first zero of J_0, squared
constexpr double kOverflow = 1e150;
}  // namespace

RadialDomain RadialDomain::ball(double radius, int dim) {
    RadialDomain d{RadialKind::ball, 0.0, radius, dim};
    d.validate();
    return d;
}

RadialDomain RadialDomain::annulus(double inner, double outer, int dim) {
    RadialDomain d{RadialKind::annulus, inner, outer, dim};
    d.validate();
    return d;
}

void RadialDomain::validate() const {
    if (dim < 2) throw InputError("radial dimension must be >= 2");
    if (!std::isfinite(r_outer) || !(r_inner >= 0.0) || !(r_inner < r_outer))
        throw InputError("radial domain needs 0 <= r_inner < r_outer");
    if ((r_inner == 0.0) != (kind == RadialKind::ball))
        throw InputError("r_inner = 0 exactly for balls and only for balls");
}

double RadialProfile::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double RadialProfile::at(double r) const {
    if (radii.empty() || r < radii.front() || r > radii.back()) return 0.0;
    const auto it = std::upper_bound(radii.begin(), radii.end(), r);
    if (it == radii.end()) return values.back();
    const auto k = static_cast<std::size_t>(it - radii.begin());
    if (k == 0) return values.front();
    const double t = (r - radii[k - 1]) / (radii[k] - radii[k - 1]);
    return (1.0 - t) * values[k - 1] + t * values[k];
}

void RadialProfile::scale(double t) {
    for (double& v : values) v *= t;
    for (double& v : derivs) v *= t;
}

double radial_operator_value(double r, double up, double upp, const EllipticityPair& ell, int n, Sign sign) {
    if (!(r > 0.0)) throw InputError("radial operator needs r > 0; use the origin expansion at r = 0");
    const double q = up / r;
    return pucci_weight(upp, ell, sign) * upp + (n - 1) * pucci_weight(q, ell, sign) * q;
}

double default_radial_step(const RadialDomain& dom) { return dom.width() / 20000.0; }

namespace {

struct SignCounter {
    int last = 0;
    int changes = 0;
    void push(double v) {
        const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (s == 0) return;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
};

}  // namespace

ShootResult shoot_source(const RadialDomain& dom, const EllipticityPair& ell, Sign sign,
                         const std::function<double(double)>& source, double start_value, double start_slope,
                         const ShootOptions& opts) {
    dom.validate();
    const double h = opts.step > 0.0 ? opts.step : default_radial_step(dom);
    if (!std::isfinite(h) || !(h > 0.0)) throw InputError("radial step must be positive");
    const int n = dom.dim;

    // u'' from the equation: w(u'') u'' = -source(u) - (n-1) w(u'/r) u'/r.
    auto second = [&](double r, double u, double up) {
        const double q = up / r;
        const double g = -source(u) - (n - 1) * pucci_weight(q, ell, sign) * q;
        return pucci_weight_inverse(g, ell, sign);
    };

    ShootResult res;
    auto& prof = res.profile;
    auto record = [&](double r, double u, double up) {
        if (opts.keep_profile) {
            prof.radii.push_back(r);
            prof.values.push_back(u);
            prof.derivs.push_back(up);
        }
    };

    double r = dom.r_inner;
    double u = start_value;
    double up = start_slope;
    SignCounter counter;
    counter.push(u);
    res.max_abs = std::abs(u);
    record(r, u, up);

    if (dom.kind == RadialKind::ball) {
        if (start_slope != 0.0) throw InputError("ball shooting starts with zero slope");
        // Even expansion u = u0 + s r^2 / 2, where n w(s) s = -source(u0)
        // because every Hessian eigenvalue equals u''(0) at the origin.
        const double r0 = std::min(10.0 * h, 0.05 * dom.r_outer);
        const double s = pucci_weight_inverse(-source(u) / n, ell, sign);
        u = start_value + 0.5 * s * r0 * r0;
        up = s * r0;
        r = r0;
        counter.push(u);
        res.max_abs = std::max(res.max_abs, std::abs(u));
        record(r, u, up);
    }

    const double span = dom.r_outer - r;
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / h - 1e-9)));
    const double dr = span / static_cast<double>(steps);
    if (opts.keep_profile) {
        prof.radii.reserve(static_cast<std::size_t>(steps) + 2);
        prof.values.reserve(static_cast<std::size_t>(steps) + 2);
        prof.derivs.reserve(static_cast<std::size_t>(steps) + 2);
    }
    int interior_changes = 0;
    const double r_start = r;
    for (long k = 0; k < steps; ++k) {
        // On the annulus the first stage sits on r_inner > 0.
        const double k1u = up;
        const double k1p = second(r, u, up);
        const double k2u = up + 0.5 * dr * k1p;
        const double k2p = second(r + 0.5 * dr, u + 0.5 * dr * k1u, k2u);
        const double k3u = up + 0.5 * dr * k2p;
        const double k3p = second(r + 0.5 * dr, u + 0.5 * dr * k2u, k3u);
        const double k4u = up + dr * k3p;
        const double k4p = second(r + dr, u + dr * k3u, k4u);
        u += dr / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        up += dr / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        r = (k + 1 == steps) ? dom.r_outer : r_start + static_cast<double>(k + 1) * dr;
        if (!std::isfinite(u) || !std::isfinite(up) || std::abs(u) > kOverflow) {
            throw DivergenceError("radial integration overflowed at r=" + std::to_string(r));
        }
        if (k + 1 < steps) {
            counter.push(u);
            interior_changes = counter.changes;
        } else {
            counter.push(u);
        }
        res.max_abs = std::max(res.max_abs, std::abs(u));
        record(r, u, up);
    }
    res.end_value = u;
    res.zero_count = interior_changes;
    res.sign_changes = counter.changes;
    return res;
}

ShootResult shoot(const RadialDomain& dom, const EllipticityPair& ell, Sign sign, Cone cone, double lambda, double c0,
                  const ShootOptions& opts) {
    if (!std::isfinite(lambda)) throw InputError("lambda must be finite");
    const double sgn = cone == Cone::positive ? 1.0 : -1.0;
    const double k = c0 + lambda;
    auto source = [k](double u) { return k * u; };
    if (dom.kind == RadialKind::ball) return shoot_source(dom, ell, sign, source, sgn, 0.0, opts);
    return shoot_source(dom, ell, sign, source, 0.0, sgn, opts);
}

double radial_residual(const RadialProfile& p, const EllipticityPair& ell, int dim, Sign sign,
                       const std::function<double(double)>& source) {
    double res = 0.0;
    if (p.size() < 3) return res;
    for (std::size_t i = 2; i + 1 < p.size(); ++i) {
        const double r = p.radii[i];
        if (!(r > 0.0)) continue;
        const double hm = r - p.radii[i - 1];
        const double hp = p.radii[i + 1] - r;
        const double upp =
            2.0 * (p.values[i + 1] * hm - p.values[i] * (hm + hp) + p.values[i - 1] * hp) / (hm * hp * (hm + hp));
        const double v = radial_operator_value(r, p.derivs[i], upp, ell, dim, sign) + source(p.values[i]);
        res = std::max(res, std::abs(v));
    }
    return res;
}

namespace {

int count_at(const RadialDomain& dom, const EllipticityPair& ell, Sign sign, Cone cone, double lambda, double c0,
             double step) {
    ShootOptions so;
    so.step = step;
    so.keep_profile = false;
    try {
        return shoot(dom, ell, sign, cone, lambda, c0, so).sign_changes;
    } catch (const DivergenceError&) {
        return 0;  // no boundary hit
    }
}

// Bisection for the smallest lambda with at least `target` sign changes
// (interior zeros plus the Dirichlet hit) starting from a lower bound.
EigenResult bisect_eigenvalue(const RadialDomain& dom, const EllipticityPair& ell, double c0, Sign sign, Cone cone,
                              int target, double lo, const RadialEigenOptions& opts) {
    const double step = opts.step > 0.0 ? opts.step : default_radial_step(dom);
    int iterations = 0;
    if (count_at(dom, ell, sign, cone, lo, c0, step) >= target) lo = -c0;

    double hi;
    if (opts.scan_step > 0.0) {
        hi = lo;
        for (long m = 0;; ++m) {
            if (m > 10'000'000) throw NoEigenvalueFound("linear bracket scan exhausted");
            hi = lo + opts.scan_step;
            ++iterations;
            if (count_at(dom, ell, sign, cone, hi, c0, step) >= target) break;
            lo = hi;
        }
    } else {
        double width = 4.0 * kJ01Squared * ell.beta / (dom.width() * dom.width());
        hi = lo + width;
        int doublings = 0;
        while (count_at(dom, ell, sign, cone, hi, c0, step) < target) {
            ++iterations;
            if (++doublings > 60) throw NoEigenvalueFound("bracket expansion failed after 60 doublings");
            lo = hi;
            width *= 2.0;
            hi = lo + width;
        }
    }

    while (hi - lo > opts.lambda_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        ++iterations;
        if (count_at(dom, ell, sign, cone, mid, c0, step) >= target)
            hi = mid;
        else
            lo = mid;
    }
    const double lambda = 0.5 * (lo + hi);

    ShootOptions so;
    so.step = step;
    ShootResult sr = shoot(dom, ell, sign, cone, lambda, c0, so);
    RadialProfile prof = std::move(sr.profile);
    prof.scale(1.0 / prof.sup_norm());

    EigenResult out;
    out.lambda = lambda;
    out.lambda_lo = lo;
    out.lambda_hi = hi;
    out.iterations = iterations;
    out.cone = cone;
    // Interior zeros of the converged profile, ignoring the O(tol) tail
    // that may dip through zero next to r_outer.
    const double band = 1e-6;
    int last = 0, changes = 0;
    for (std::size_t i = 0; i + 1 < prof.size(); ++i) {
        const double v = prof.values[i];
        if (std::abs(v) <= band) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    out.zero_count = changes;
    const double mu = c0 + lambda;
    out.residual = std::max(std::abs(prof.values.back()),
                            radial_residual(prof, ell, dom.dim, sign, [mu](double u) { return mu * u; }));
    out.eigenfunction = std::move(prof);
    return out;
}

}  // namespace

EigenResult principal_eigenvalue_radial(const RadialDomain& dom, const EllipticityPair& ell, double c0, Sign sign,
                                        Cone cone, const RadialEigenOptions& opts) {
    dom.validate();
    return bisect_eigenvalue(dom, ell, c0, sign, cone, 1, -c0, opts);
}

EigenResult radial_eigenvalue_with_zeros(const RadialDomain& dom, const EllipticityPair& ell, double c0, Sign sign,
                                         Cone cone, int interior_zeros, const RadialEigenOptions& opts) {
    if (interior_zeros < 0) throw InputError("interior zero count must be nonnegative");
    dom.validate();
    EigenResult prev = bisect_eigenvalue(dom, ell, c0, sign, cone, 1, -c0, opts);
    for (int z = 1; z <= interior_zeros; ++z) {
        // Sturm ordering: the previous eigenvalue's upper bracket has fewer
        // sign changes than the next target; bisect_eigenvalue re-checks.
        prev = bisect_eigenvalue(dom, ell, c0, sign, cone, z + 1, prev.lambda_hi, opts);
        if (prev.zero_count != z) {
            throw NoEigenvalueFound("zero count " + std::to_string(prev.zero_count) + " does not match target " +
                                    std::to_string(z));
        }
    }
    return prev;
}

EigenResult radial_nodal_eigenvalue(const RadialDomain& dom, const EllipticityPair& ell, double c0, Sign sign,
                                    int interior_zeros, const RadialEigenOptions& opts) {
    if (interior_zeros < 1) throw InputError("nodal eigenvalues need at least one interior zero");
    EigenResult pos = radial_eigenvalue_with_zeros(dom, ell, c0, sign, Cone::positive, interior_zeros, opts);
    EigenResult neg = radial_eigenvalue_with_zeros(dom, ell, c0, sign, Cone::negative, interior_zeros, opts);
    return neg.lambda < pos.lambda ? neg : pos;
}

}  // namespace pucci
