#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace pucci {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double t) const { return {x * t, y * t}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const { return *this * (1.0 / norm()); }
    /// Counter-clockwise quarter turn.
    Vec2 perp() const { return {-y, x}; }
};

/// sigma_e(x) = x - 2 (x . e) e
inline Vec2 reflect(Vec2 p, Vec2 e) { return p - e * (2.0 * p.dot(e)); }

inline Vec2 unit_at_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Open half-plane {x : x . normal > offset}.
struct HalfPlane {
    Vec2 normal{1.0, 0.0};
    double offset = 0.0;
};

enum class DomainKind { disc, annulus, cap_disc, cap_annulus, rectangle, ellipse };

std::string to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

/// Planar computational domain: a base shape centered at the origin,
/// optionally intersected with one half-plane. Caps are the base disc or
/// annulus cut by {x . e > 0}.
struct DomainSpec {
    DomainKind kind = DomainKind::disc;
    double r_inner = 0.0;  ///< annulus inner radius
    double r_outer = 1.0;  ///< disc/annulus outer radius
    double half_x = 1.0;   ///< rectangle/ellipse half-width along x
    double half_y = 1.0;   ///< rectangle/ellipse half-width along y
    std::optional<HalfPlane> cut;

    static DomainSpec disc(double radius);
    static DomainSpec annulus(double inner, double outer);
    static DomainSpec cap_disc(double radius, Vec2 e);
    static DomainSpec cap_annulus(double inner, double outer, Vec2 e);
    static DomainSpec rectangle(double a, double b);
    static DomainSpec ellipse(double a, double b);

    /// Same shape intersected with {x . e > t}. Replaces any existing cut.
    DomainSpec with_cut(Vec2 e, double t) const;
    /// Shape without its half-plane restriction.
    DomainSpec base() const;

    void validate() const;

    /// Strict membership; eps shrinks the domain by a relative margin.
    bool contains(Vec2 p, double eps = 0.0) const;

    /// Smallest s in (0, +inf) where p + s v meets the boundary of some
    /// constraint, or +inf. p must be inside.
    double first_exit(Vec2 p, Vec2 v) const;

    bool is_radial() const;  ///< disc or annulus centered at 0, no cut
    bool is_symmetric_under(Vec2 e) const;
    bool contains_origin() const;
    /// Axis-aligned bounding box [xmin, xmax] x [ymin, ymax].
    void bounding_box(double& xmin, double& xmax, double& ymin, double& ymax) const;
    /// Characteristic size used for geometric tolerances.
    double scale() const;
    std::string describe() const;
};

}  // namespace pucci
