#include "pucci/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pucci/errors.hpp"

namespace pucci {

DirectionSet DirectionSet::uniform(int m) {
    if (m < 8) throw InputError("a direction set needs at least 8 directions");
    DirectionSet d;
    for (int k = 0; k < m; ++k) d.dirs.push_back(unit_at_angle(std::numbers::pi * k / m));
    return d;
}

ScalarField reflect_field(const ScalarField& u, Vec2 e) {
    const Grid2D& g = *u.grid;
    if (!g.domain().is_symmetric_under(e)) throw DomainError("domain is not symmetric under the reflection");
    e = e.normalized();
    ScalarField out(u.grid);
    for (int k = 0; k < g.size(); ++k) out[k] = interpolate(u, reflect(g.node(k).pos, e));
    return out;
}

std::string to_string(ReflectionSign s) {
    switch (s) {
        case ReflectionSign::nonneg:
            return "nonneg";
        case ReflectionSign::nonpos:
            return "nonpos";
        case ReflectionSign::zero:
            return "zero";
        case ReflectionSign::mixed:
            return "mixed";
    }
    return "?";
}

double default_reflection_tol(const ScalarField& u) {
    const double h = u.grid->h();
    return 10.0 * h * h * u.sup_norm();
}

ReflectionGap reflection_gap(const ScalarField& u, Vec2 e, double tol) {
    e = e.normalized();
    const Grid2D& g = *u.grid;
    ScalarField r = reflect_field(u, e);
    ReflectionGap gap;
    gap.tol = tol < 0.0 ? default_reflection_tol(u) : tol;
    gap.w = ScalarField(u.grid);
    bool any = false;
    for (int k = 0; k < g.size(); ++k) {
        if (!(g.node(k).pos.dot(e) > 1e-12 * g.h())) continue;
        const double w = u[k] - r[k];
        gap.w[k] = w;
        if (!any) {
            gap.min_w = gap.max_w = w;
            any = true;
        } else {
            gap.min_w = std::min(gap.min_w, w);
            gap.max_w = std::max(gap.max_w, w);
        }
    }
    const bool lower_ok = gap.min_w >= -gap.tol;
    const bool upper_ok = gap.max_w <= gap.tol;
    if (lower_ok && upper_ok)
        gap.sign = ReflectionSign::zero;
    else if (lower_ok)
        gap.sign = ReflectionSign::nonneg;
    else if (upper_ok)
        gap.sign = ReflectionSign::nonpos;
    else
        gap.sign = ReflectionSign::mixed;
    gap.max_violation = std::min(std::max(0.0, -gap.min_w), std::max(0.0, gap.max_w));
    return gap;
}

std::string to_string(FssClass c) {
    switch (c) {
        case FssClass::radial:
            return "radial";
        case FssClass::foliated_schwarz:
            return "foliated_schwarz";
        case FssClass::not_fss:
            return "not_fss";
    }
    return "?";
}

namespace {

bool consistent(ReflectionSign s, double ep, double band) {
    if (s == ReflectionSign::mixed) return false;
    if (ep > band) return s == ReflectionSign::nonneg || s == ReflectionSign::zero;
    if (ep < -band) return s == ReflectionSign::nonpos || s == ReflectionSign::zero;
    return true;
}

int count_consistent(const FssReport& r, Vec2 p, double band) {
    int n = 0;
    for (std::size_t k = 0; k < r.directions.size(); ++k)
        if (consistent(r.per_direction_sign[k], r.directions[k].dot(p), band)) ++n;
    return n;
}

}  // namespace

FssReport detect_fss(const ScalarField& u, const DirectionSet& dirs, double tol) {
    const Grid2D& g = *u.grid;
    if (!g.domain().is_radial()) throw DomainError("foliated Schwarz detection needs a disc or annulus");
    if (dirs.count() < 8) throw InputError("a direction set needs at least 8 directions");
    FssReport rep;
    rep.directions = dirs.dirs;
    rep.sampling_resolution = dirs.count();
    rep.tol = tol < 0.0 ? default_reflection_tol(u) : tol;
    bool all_zero = true, any_mixed = false;
    for (const Vec2& e : dirs.dirs) {
        const ReflectionGap gap = reflection_gap(u, e, rep.tol);
        rep.per_direction_sign.push_back(gap.sign);
        rep.max_violation = std::max(rep.max_violation, gap.max_violation);
        all_zero = all_zero && gap.sign == ReflectionSign::zero;
        any_mixed = any_mixed || gap.sign == ReflectionSign::mixed;
    }
    if (all_zero) {
        rep.classification = FssClass::radial;
        return rep;
    }
    if (any_mixed) {
        rep.classification = FssClass::not_fss;
        return rep;
    }
    const int m = dirs.count();
    const double band = std::sin(std::numbers::pi / m);
    Vec2 moment;
    double mass = 0.0;
    for (int k = 0; k < g.size(); ++k) {
        moment = moment + g.node(k).pos * u[k];
        mass += std::abs(u[k]) * g.domain().scale();
    }
    if (moment.norm() > 1e-12 * mass) {
        const Vec2 p = moment.normalized();
        if (count_consistent(rep, p, band) == m) {
            rep.axis_p = p;
            rep.classification = FssClass::foliated_schwarz;
            return rep;
        }
    }
    // Search candidate axes; among the best ones keep the centre of the
    // first maximal run of angles.
    rep.axis_from_moment = false;
    const int cand = 4 * m;
    std::vector<int> score(static_cast<std::size_t>(cand));
    int best = -1;
    for (int a = 0; a < cand; ++a) {
        score[static_cast<std::size_t>(a)] =
            count_consistent(rep, unit_at_angle(2.0 * std::numbers::pi * a / cand), band);
        best = std::max(best, score[static_cast<std::size_t>(a)]);
    }
    int run_start = -1, run_len = 0, cur_start = -1, cur_len = 0;
    for (int a = 0; a < 2 * cand; ++a) {
        if (score[static_cast<std::size_t>(a % cand)] == best) {
            if (cur_len == 0) cur_start = a;
            if (++cur_len > run_len && cur_len <= cand) {
                run_len = cur_len;
                run_start = cur_start;
            }
        } else {
            cur_len = 0;
        }
    }
    const double mid = run_start + 0.5 * (run_len - 1);
    const Vec2 p = unit_at_angle(2.0 * std::numbers::pi * mid / cand);
    if (best == m) {
        rep.axis_p = p;
        rep.classification = FssClass::foliated_schwarz;
    } else {
        rep.classification = FssClass::not_fss;
    }
    return rep;
}

namespace {

// Derivative along a lattice axis at a node.
double axis_derivative(const ScalarField& u, int node, int dir, int di, int dj, AngularClosure closure) {
    const Grid2D& g = *u.grid;
    const StencilArm& a = g.arm(node, dir);
    const double h = g.h();
    const double u0 = u[node];
    if (closure == AngularClosure::dirichlet_zero || (a.plus >= 0 && a.minus >= 0)) {
        const double sp = a.s_plus, sm = a.s_minus;
        const double up = a.plus >= 0 ? u[a.plus] : 0.0;
        const double um = a.minus >= 0 ? u[a.minus] : 0.0;
        return (sm * sm * up - sp * sp * um + (sp * sp - sm * sm) * u0) / (h * sp * sm * (sp + sm));
    }
    const auto& n = g.node(node);
    if (a.plus >= 0) {
        const int far = g.node_at(n.i + 2 * di, n.j + 2 * dj);
        if (far >= 0) return (-3.0 * u0 + 4.0 * u[a.plus] - u[far]) / (2.0 * h);
        return (u[a.plus] - u0) / h;
    }
    if (a.minus >= 0) {
        const int far = g.node_at(n.i - 2 * di, n.j - 2 * dj);
        if (far >= 0) return (3.0 * u0 - 4.0 * u[a.minus] + u[far]) / (2.0 * h);
        return (u0 - u[a.minus]) / h;
    }
    return 0.0;
}

}  // namespace

ScalarField angular_derivative(const ScalarField& u, AngularClosure closure) {
    const Grid2D& g = *u.grid;
    ScalarField out(u.grid);
    for (int k = 0; k < g.size(); ++k) {
        const Vec2 x = g.node(k).pos;
        const double ux = axis_derivative(u, k, g.axis_x(), 1, 0, closure);
        const double uy = axis_derivative(u, k, g.axis_y(), 0, 1, closure);
        out[k] = -x.y * ux + x.x * uy;
    }
    return out;
}

double subsolution_residual(const ScalarField& v, const ScalarField& c, const EllipticityPair& ell, Sign sign) {
    if (v.grid != c.grid && v.size() != c.size()) throw InputError("v and c must live on the same grid");
    ScalarField m = discrete_pucci(v, ell, sign);
    double r = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < v.size(); ++k) r = std::max(r, -m[k] - c[k] * v[k]);
    return v.size() == 0 ? 0.0 : r;
}

NodalReport nodal_analysis(const ScalarField& u, double zero_band) {
    const Grid2D& g = *u.grid;
    NodalReport rep;
    rep.zero_band = zero_band < 0.0 ? 1e-3 * u.sup_norm() : zero_band;
    const double band = rep.zero_band;
    auto strict = [&](int k) { return std::abs(u[k]) > band ? (u[k] > 0 ? 1 : -1) : 0; };

    for (int k = 0; k < g.size(); ++k) {
        const auto& n = g.node(k);
        for (const auto& [di, dj] : {std::pair{1, 0}, std::pair{0, 1}}) {
            const int nb = g.node_at(n.i + di, n.j + dj);
            if (nb < 0) continue;
            if (strict(k) * strict(nb) < 0) {
                rep.sign_change_edges.push_back({k, nb});
                if (g.near_boundary(k) || g.near_boundary(nb)) rep.touches_boundary = true;
            }
        }
    }
    bool layer_pos = false, layer_neg = false;
    for (int k = 0; k < g.size(); ++k) {
        if (!g.near_boundary(k)) continue;
        layer_pos = layer_pos || strict(k) > 0;
        layer_neg = layer_neg || strict(k) < 0;
    }
    if (layer_pos && layer_neg) rep.touches_boundary = true;

    std::vector<int> label = label_sign_regions(u, band, rep.num_nodal_regions);
    if (rep.num_nodal_regions > 0) {
        std::vector<int> sign_of(static_cast<std::size_t>(rep.num_nodal_regions), 0);
        for (int k = 0; k < g.size(); ++k)
            if (label[static_cast<std::size_t>(k)] >= 0)
                sign_of[static_cast<std::size_t>(label[static_cast<std::size_t>(k)])] = strict(k);
        for (int s : sign_of) (s > 0 ? rep.num_positive_regions : rep.num_negative_regions)++;
    }
    int tmp = 0;
    label_sign_regions(u, band / 10.0, tmp);
    rep.regions_band_tenth = tmp;
    label_sign_regions(u, band * 10.0, tmp);
    rep.regions_band_tenfold = tmp;

    if (g.domain().contains_origin()) {
        const Vec2 off = g.origin_offset();
        const double fi = -off.x / g.h(), fj = -off.y / g.h();
        const int i0 = static_cast<int>(std::floor(fi)), j0 = static_cast<int>(std::floor(fj));
        const bool on_node = std::abs(fi - std::round(fi)) < 1e-9 && std::abs(fj - std::round(fj)) < 1e-9;
        bool pos = false, neg = false;
        const int lo_i = on_node ? static_cast<int>(std::lround(fi)) - 1 : i0;
        const int lo_j = on_node ? static_cast<int>(std::lround(fj)) - 1 : j0;
        const int span = on_node ? 3 : 2;
        for (int a = 0; a < span; ++a) {
            for (int b = 0; b < span; ++b) {
                const int k = g.node_at(lo_i + a, lo_j + b);
                if (k < 0) continue;
                pos = pos || strict(k) > 0;
                neg = neg || strict(k) < 0;
            }
        }
        if (on_node) {
            const int k0 = g.node_at(static_cast<int>(std::lround(fi)), static_cast<int>(std::lround(fj)));
            if (k0 >= 0 && strict(k0) == 0 && u.sup_norm() > 0.0) pos = neg = true;
        }
        rep.contains_origin = pos && neg;
    }
    return rep;
}

std::string to_string(FamilyKind k) { return k == FamilyKind::caps ? "caps" : "concentric"; }

FamilyKind family_kind_from_string(const std::string& s) {
    if (s == "caps") return FamilyKind::caps;
    if (s == "concentric") return FamilyKind::concentric;
    throw InputError("unknown family '" + s + "'");
}

namespace {

struct Split {
    DomainSpec inner, outer;
    Vec2 e;
    double t = 0.0, rho = 0.0;
    std::string describe;
};

std::vector<Split> family_members(const DomainSpec& dom, FamilyKind family, const FamilyOptions& opts) {
    if (dom.cut) throw DomainError("split families need an uncut domain");
    std::vector<Split> out;
    if (family == FamilyKind::caps) {
        if (opts.directions < 1 || opts.offsets < 1) throw InputError("family resolution must be positive");
        double xmin, xmax, ymin, ymax;
        dom.bounding_box(xmin, xmax, ymin, ymax);
        for (int k = 0; k < opts.directions; ++k) {
            const Vec2 e = unit_at_angle(std::numbers::pi * k / opts.directions);
            // Support value of the domain along e.
            double extent = 0.0;
            for (Vec2 c : {Vec2{xmin, ymin}, Vec2{xmin, ymax}, Vec2{xmax, ymin}, Vec2{xmax, ymax}})
                extent = std::max(extent, c.dot(e));
            if (dom.kind == DomainKind::disc || dom.kind == DomainKind::annulus) extent = dom.r_outer;
            for (int j = 0; j < opts.offsets; ++j) {
                const double t = opts.offsets == 1 ? 0.0 : extent * (-0.75 + 1.5 * j / (opts.offsets - 1));
                Split s;
                s.inner = dom.with_cut(e, t);
                s.outer = dom.with_cut(e * -1.0, -t);
                s.e = e;
                s.t = t;
                std::ostringstream os;
                os << "cap e=(" << e.x << "," << e.y << ") t=" << t;
                s.describe = os.str();
                out.push_back(std::move(s));
            }
        }
    } else {
        if (opts.radii < 1) throw InputError("family resolution must be positive");
        if (dom.kind != DomainKind::disc && dom.kind != DomainKind::annulus)
            throw DomainError("concentric family needs a disc or annulus");
        const double a = dom.kind == DomainKind::annulus ? dom.r_inner : 0.0, b = dom.r_outer;
        for (int j = 0; j < opts.radii; ++j) {
            const double rho = a + (b - a) * (j + 1) / (opts.radii + 1);
            Split s;
            s.inner = a > 0.0 ? DomainSpec::annulus(a, rho) : DomainSpec::disc(rho);
            s.outer = DomainSpec::annulus(rho, b);
            s.rho = rho;
            std::ostringstream os;
            os << "concentric rho=" << rho;
            s.describe = os.str();
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::optional<double> sub_eigenvalue(const Potential& c, const DomainSpec& d, double h, Vec2 offset,
                                     const EllipticityPair& ell, Cone cone, const FamilyOptions& opts) {
    try {
        GridPtr g = build_grid(d, h, opts.stencil, offset);
        return principal_eigenvalue_grid(c, g, ell, Sign::plus, cone, opts.eigen).lambda;
    } catch (const GridError&) {
        return std::nullopt;
    } catch (const EigenError&) {
        return std::nullopt;
    }
}

FamilyEstimate family_estimate(const Potential& c, const DomainSpec& dom, double h, const EllipticityPair& ell,
                               FamilyKind family, const FamilyOptions& opts, bool gamma) {
    const Vec2 offset = c.has_field() ? c.field().grid->origin_offset() : Vec2{};
    FamilyEstimate best;
    best.value = std::numeric_limits<double>::infinity();
    auto consider = [&](double inner, double outer, const Split& s, bool swapped) {
        const double v = std::max(inner, outer);
        ++best.members;
        if (v < best.value) {
            best.value = v;
            best.lambda_inner = inner;
            best.lambda_outer = outer;
            best.e = swapped ? s.e * -1.0 : s.e;
            best.t = swapped ? -s.t : s.t;
            best.rho = s.rho;
            best.minimizer = s.describe + (swapped ? " (swapped)" : "");
        }
    };
    for (const Split& s : family_members(dom, family, opts)) {
        const auto in_p = sub_eigenvalue(c, s.inner, h, offset, ell, Cone::positive, opts);
        if (!in_p) continue;
        if (!gamma) {
            const auto out_p = sub_eigenvalue(c, s.outer, h, offset, ell, Cone::positive, opts);
            if (out_p) consider(*in_p, *out_p, s, false);
            continue;
        }
        const auto out_m = sub_eigenvalue(c, s.outer, h, offset, ell, Cone::negative, opts);
        if (out_m) consider(*in_p, *out_m, s, false);
        if (family == FamilyKind::caps) {
            const auto out_p = sub_eigenvalue(c, s.outer, h, offset, ell, Cone::positive, opts);
            const auto in_m = sub_eigenvalue(c, s.inner, h, offset, ell, Cone::negative, opts);
            if (out_p && in_m) consider(*out_p, *in_m, s, true);
        }
    }
    if (best.members == 0) throw EigenError("no family member produced a usable split");
    return best;
}

}  // namespace

FamilyEstimate mu2_family_estimate(const Potential& c, const DomainSpec& dom, double h, const EllipticityPair& ell,
                                   FamilyKind family, const FamilyOptions& opts) {
    return family_estimate(c, dom, h, ell, family, opts, false);
}

FamilyEstimate gamma2_family_estimate(const Potential& c, const DomainSpec& dom, double h, const EllipticityPair& ell,
                                      FamilyKind family, const FamilyOptions& opts) {
    return family_estimate(c, dom, h, ell, family, opts, true);
}

ScalarField sample_radial_profile(const RadialProfile& p, const GridPtr& grid) {
    return ScalarField::sample(grid, [&p](Vec2 x) { return p.at(x.norm()); });
}

}  // namespace pucci
