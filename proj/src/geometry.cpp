#include "pucci/geometry.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "pucci/errors.hpp"

namespace pucci {

std::string to_string(DomainKind k) {
    switch (k) {
        case DomainKind::disc:
            return "disc";
        case DomainKind::annulus:
            return "annulus";
        case DomainKind::cap_disc:
            return "cap_disc";
        case DomainKind::cap_annulus:
            return "cap_annulus";
        case DomainKind::rectangle:
            return "rectangle";
        case DomainKind::ellipse:
            return "ellipse";
    }
    return "unknown";
}

DomainKind domain_kind_from_string(const std::string& s) {
    if (s == "disc" || s == "ball") return DomainKind::disc;
    if (s == "annulus") return DomainKind::annulus;
    if (s == "cap_disc") return DomainKind::cap_disc;
    if (s == "cap_annulus") return DomainKind::cap_annulus;
    if (s == "rectangle") return DomainKind::rectangle;
    if (s == "ellipse") return DomainKind::ellipse;
    throw InputError("unknown domain kind '" + s + "'");
}

DomainSpec DomainSpec::disc(double radius) {
    DomainSpec d;
    d.kind = DomainKind::disc;
    d.r_outer = radius;
    d.validate();
    return d;
}

DomainSpec DomainSpec::annulus(double inner, double outer) {
    DomainSpec d;
    d.kind = DomainKind::annulus;
    d.r_inner = inner;
    d.r_outer = outer;
    d.validate();
    return d;
}

DomainSpec DomainSpec::cap_disc(double radius, Vec2 e) {
    DomainSpec d;
    d.kind = DomainKind::cap_disc;
    d.r_outer = radius;
    d.cut = HalfPlane{e, 0.0};
    d.validate();
    return d;
}

DomainSpec DomainSpec::cap_annulus(double inner, double outer, Vec2 e) {
    DomainSpec d;
    d.kind = DomainKind::cap_annulus;
    d.r_inner = inner;
    d.r_outer = outer;
    d.cut = HalfPlane{e, 0.0};
    d.validate();
    return d;
}

DomainSpec DomainSpec::rectangle(double a, double b) {
    DomainSpec d;
    d.kind = DomainKind::rectangle;
    d.half_x = a;
    d.half_y = b;
    d.validate();
    return d;
}

DomainSpec DomainSpec::ellipse(double a, double b) {
    DomainSpec d;
    d.kind = DomainKind::ellipse;
    d.half_x = a;
    d.half_y = b;
    d.validate();
    return d;
}

DomainSpec DomainSpec::with_cut(Vec2 e, double t) const {
    DomainSpec d = base();
    d.cut = HalfPlane{e, t};
    if (t == 0.0) {
        if (d.kind == DomainKind::disc) d.kind = DomainKind::cap_disc;
        if (d.kind == DomainKind::annulus) d.kind = DomainKind::cap_annulus;
    }
    d.validate();
    return d;
}

DomainSpec DomainSpec::base() const {
    DomainSpec d = *this;
    d.cut.reset();
    if (d.kind == DomainKind::cap_disc) d.kind = DomainKind::disc;
    if (d.kind == DomainKind::cap_annulus) d.kind = DomainKind::annulus;
    return d;
}

void DomainSpec::validate() const {
    auto bad = [](double v) { return !std::isfinite(v) || !(v > 0.0); };
    switch (kind) {
        case DomainKind::disc:
        case DomainKind::cap_disc:
            if (bad(r_outer)) throw InputError("disc radius must be positive");
            break;
        case DomainKind::annulus:
        case DomainKind::cap_annulus:
            if (bad(r_inner) || bad(r_outer) || !(r_inner < r_outer)) throw InputError("annulus needs 0 < R0 < R1");
            break;
        case DomainKind::rectangle:
        case DomainKind::ellipse:
            if (bad(half_x) || bad(half_y)) throw InputError("half-widths must be positive");
            break;
    }
    const bool is_cap = kind == DomainKind::cap_disc || kind == DomainKind::cap_annulus;
    if (is_cap && (!cut || cut->offset != 0.0)) throw InputError("caps need a cut through the origin");
    if (cut) {
        if (std::abs(cut->normal.norm() - 1.0) > 1e-12) throw InputError("cap direction must be a unit vector");
        if (!std::isfinite(cut->offset)) throw InputError("cut offset must be finite");
    }
}

bool DomainSpec::contains(Vec2 p, double eps) const {
    const double tol = eps * scale();
    const double r2 = p.dot(p);
    bool in = true;
    switch (kind) {
        case DomainKind::disc:
        case DomainKind::cap_disc:
            in = std::sqrt(r2) < r_outer - tol;
            break;
        case DomainKind::annulus:
        case DomainKind::cap_annulus: {
            const double r = std::sqrt(r2);
            in = r < r_outer - tol && r > r_inner + tol;
            break;
        }
        case DomainKind::rectangle:
            in = std::abs(p.x) < half_x - tol && std::abs(p.y) < half_y - tol;
            break;
        case DomainKind::ellipse: {
            const double q = (p.x / half_x) * (p.x / half_x) + (p.y / half_y) * (p.y / half_y);
            in = q < 1.0 - eps;
            break;
        }
    }
    if (in && cut) in = p.dot(cut->normal) > cut->offset + tol;
    return in;
}

namespace {

// Smallest positive root of a s^2 + b s + c = 0 (a > 0), or +inf.
double smallest_positive_root(double a, double b, double c) {
    const double inf = std::numeric_limits<double>::infinity();
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return inf;
    const double sq = std::sqrt(disc);
    const double qv = -0.5 * (b + std::copysign(sq, b));
    double r1 = qv / a;
    double r2 = qv != 0.0 ? c / qv : inf;
    if (r1 > r2) std::swap(r1, r2);
    if (r1 > 0.0) return r1;
    if (r2 > 0.0) return r2;
    return inf;
}

double line_hit(double start, double dir, double level) {
    // start + s dir = level
    if (dir == 0.0) return std::numeric_limits<double>::infinity();
    const double s = (level - start) / dir;
    return s > 0.0 ? s : std::numeric_limits<double>::infinity();
}

double circle_hit(Vec2 p, Vec2 v, double radius) {
    return smallest_positive_root(v.dot(v), 2.0 * p.dot(v), p.dot(p) - radius * radius);
}

}  // namespace

double DomainSpec::first_exit(Vec2 p, Vec2 v) const {
    double s = std::numeric_limits<double>::infinity();
    switch (kind) {
        case DomainKind::disc:
        case DomainKind::cap_disc:
            s = circle_hit(p, v, r_outer);
            break;
        case DomainKind::annulus:
        case DomainKind::cap_annulus:
            s = std::min(circle_hit(p, v, r_outer), circle_hit(p, v, r_inner));
            break;
        case DomainKind::rectangle:
            s = std::min({line_hit(p.x, v.x, half_x), line_hit(p.x, v.x, -half_x), line_hit(p.y, v.y, half_y),
                          line_hit(p.y, v.y, -half_y)});
            break;
        case DomainKind::ellipse: {
            const double ia = 1.0 / (half_x * half_x);
            const double ib = 1.0 / (half_y * half_y);
            s = smallest_positive_root(v.x * v.x * ia + v.y * v.y * ib, 2.0 * (p.x * v.x * ia + p.y * v.y * ib),
                                       p.x * p.x * ia + p.y * p.y * ib - 1.0);
            break;
        }
    }
    if (cut) s = std::min(s, line_hit(p.dot(cut->normal), v.dot(cut->normal), cut->offset));
    return s;
}

bool DomainSpec::is_radial() const { return !cut && (kind == DomainKind::disc || kind == DomainKind::annulus); }

bool DomainSpec::is_symmetric_under(Vec2 e) const {
    constexpr double tol = 1e-12;
    bool base_ok = false;
    switch (kind) {
        case DomainKind::disc:
        case DomainKind::annulus:
        case DomainKind::cap_disc:
        case DomainKind::cap_annulus:
            base_ok = true;
            break;
        case DomainKind::rectangle:
        case DomainKind::ellipse: {
            const bool axis = std::abs(e.x) < tol || std::abs(e.y) < tol;
            const bool diag = std::abs(std::abs(e.x) - std::abs(e.y)) < tol;
            base_ok = axis || (half_x == half_y && (diag || kind == DomainKind::ellipse));
            break;
        }
    }
    if (!base_ok) return false;
    if (cut) return std::abs(cut->normal.dot(e)) < tol;
    return true;
}

bool DomainSpec::contains_origin() const { return contains({0.0, 0.0}); }

void DomainSpec::bounding_box(double& xmin, double& xmax, double& ymin, double& ymax) const {
    switch (kind) {
        case DomainKind::disc:
        case DomainKind::annulus:
        case DomainKind::cap_disc:
        case DomainKind::cap_annulus:
            xmin = ymin = -r_outer;
            xmax = ymax = r_outer;
            break;
        case DomainKind::rectangle:
        case DomainKind::ellipse:
            xmin = -half_x;
            xmax = half_x;
            ymin = -half_y;
            ymax = half_y;
            break;
    }
}

double DomainSpec::scale() const {
    switch (kind) {
        case DomainKind::rectangle:
        case DomainKind::ellipse:
            return std::max(half_x, half_y);
        default:
            return r_outer;
    }
}

std::string DomainSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind);
    switch (kind) {
        case DomainKind::disc:
        case DomainKind::cap_disc:
            os << " R=" << r_outer;
            break;
        case DomainKind::annulus:
        case DomainKind::cap_annulus:
            os << " R0=" << r_inner << " R1=" << r_outer;
            break;
        default:
            os << " a=" << half_x << " b=" << half_y;
    }
    if (cut) os << " cut=(" << cut->normal.x << "," << cut->normal.y << ")>" << cut->offset;
    return os.str();
}

}  // namespace pucci
