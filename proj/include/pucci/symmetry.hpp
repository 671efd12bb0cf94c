#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pucci/eigen_result.hpp"
#include "pucci/grid.hpp"
#include "pucci/grid2d.hpp"
#include "pucci/pucci_core.hpp"

namespace pucci {

/// m >= 8 unit vectors at angles k pi / m, k = 0..m-1.
struct DirectionSet {
    std::vector<Vec2> dirs;

    static DirectionSet uniform(int m);
    int count() const { return static_cast<int>(dirs.size()); }
};

/// u(sigma_e x) at each node; reflected points outside the domain give 0.
/// Throws DomainError when the domain is not symmetric under sigma_e.
ScalarField reflect_field(const ScalarField& u, Vec2 e);

enum class ReflectionSign { nonneg, nonpos, zero, mixed };
std::string to_string(ReflectionSign s);

struct ReflectionGap {
    ReflectionSign sign = ReflectionSign::zero;
    ScalarField w;       ///< u - u o sigma_e, zero off B(e)
    double min_w = 0.0;  ///< over B(e)
    double max_w = 0.0;
    double max_violation = 0.0;  ///< min of the opposing excesses of the two one-sided hypotheses
    double tol = 0.0;
};

/// Default band 10 h^2 |u|_inf.
double default_reflection_tol(const ScalarField& u);

/// w_e on B(e) = {x . e > 0} classified with band tol (negative: default).
ReflectionGap reflection_gap(const ScalarField& u, Vec2 e, double tol = -1.0);

enum class FssClass { radial, foliated_schwarz, not_fss };
std::string to_string(FssClass c);

struct FssReport {
    FssClass classification = FssClass::not_fss;
    std::optional<Vec2> axis_p;
    std::vector<Vec2> directions;
    std::vector<ReflectionSign> per_direction_sign;
    double max_violation = 0.0;
    double tol = 0.0;
    int sampling_resolution = 0;
    bool axis_from_moment = true;  ///< false when the axis was re-estimated by search
};

/// Foliated Schwarz classification by reflections over `dirs`.
/// Requires a disc or annulus.
FssReport detect_fss(const ScalarField& u, const DirectionSet& dirs, double tol = -1.0);

enum class AngularClosure {
    dirichlet_zero,  ///< nonuniform centered differences using the zero boundary value
    extrapolate,     ///< one-sided interior differences where an arm reaches the boundary
};

/// u_theta = -x2 u_x + x1 u_y by centered differences.
ScalarField angular_derivative(const ScalarField& u, AngularClosure closure = AngularClosure::dirichlet_zero);

/// max over nodes of -M^sign_h(v) - c v.
double subsolution_residual(const ScalarField& v, const ScalarField& c, const EllipticityPair& ell,
                            Sign sign = Sign::plus);

struct GridEdge {
    int a = -1;
    int b = -1;
};

struct NodalReport {
    std::vector<GridEdge> sign_change_edges;
    bool touches_boundary = false;
    bool contains_origin = false;
    int num_nodal_regions = 0;
    int num_positive_regions = 0;
    int num_negative_regions = 0;
    double zero_band = 0.0;
    int regions_band_tenth = 0;    ///< region count with band / 10
    int regions_band_tenfold = 0;  ///< region count with band * 10
};

/// Nodal set diagnostics; zero_band < 0 selects 1e-3 |u|_inf.
NodalReport nodal_analysis(const ScalarField& u, double zero_band = -1.0);

enum class FamilyKind { caps, concentric };
std::string to_string(FamilyKind k);
FamilyKind family_kind_from_string(const std::string& s);

struct FamilyOptions {
    int directions = 32;  ///< caps: normals at angles k pi / directions
    int offsets = 17;     ///< caps: t on a uniform grid of [-0.75 R, 0.75 R]; 1 gives t = 0 only
    int radii = 33;       ///< concentric splitting radii
    StencilConfig stencil;
    GridEigenOptions eigen;
};

struct FamilyEstimate {
    double value = 0.0;
    std::string minimizer;
    double lambda_inner = 0.0;  ///< lambda_1^+(D) at the minimizer
    double lambda_outer = 0.0;  ///< lambda_1^+ or lambda_1^- of the complement
    Vec2 e;
    double t = 0.0;
    double rho = 0.0;
    int members = 0;
};

/// Upper bound of the second eigenvalue by the split family: min over D of
/// max{lambda_1^+(D), lambda_1^+(complement)} for L = M^+ + c.
FamilyEstimate mu2_family_estimate(const Potential& c, const DomainSpec& dom, double h, const EllipticityPair& ell,
                                   FamilyKind family, const FamilyOptions& opts = {});

/// Same with lambda_1^- on the complement; both orientations of each split
/// are members.
FamilyEstimate gamma2_family_estimate(const Potential& c, const DomainSpec& dom, double h, const EllipticityPair& ell,
                                      FamilyKind family, const FamilyOptions& opts = {});

/// Radial profile sampled at |x| on a grid.
ScalarField sample_radial_profile(const RadialProfile& p, const GridPtr& grid);

}  // namespace pucci
