#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pucci/geometry.hpp"

namespace pucci {

/// Number of directions of the wide stencil. Directions are the primitive
/// lattice vectors of the Farey set of a given width, so every arm ends on
/// a lattice node; supported counts are 2, 4, 8, 16, 24, 40, ...
struct StencilConfig {
    int num_directions = 16;
};

/// Lattice step (p, q) in units of h; length = |(p, q)|.
struct LatticeDir {
    int p = 1;
    int q = 0;
    double length = 1.0;
    double angle() const;
};

/// Half-circle stencil directions, ordered by angle in [0, pi).
std::vector<LatticeDir> stencil_directions(const StencilConfig& st);

struct GridNode {
    int i = 0;
    int j = 0;
    Vec2 pos;
};

/// Arms of one stencil direction at one node. A neighbor index of -1 means
/// the arm ends on the boundary at fraction s of the full step.
struct StencilArm {
    int plus = -1;
    int minus = -1;
    double s_plus = 1.0;
    double s_minus = 1.0;
};

/// Uniform Cartesian lattice x = offset + (i h, j h) restricted to the nodes
/// strictly inside a domain. Immutable once built.
class Grid2D {
public:
    double h() const { return h_; }
    Vec2 origin_offset() const { return offset_; }
    const DomainSpec& domain() const { return domain_; }
    const std::vector<LatticeDir>& directions() const { return dirs_; }
    int num_directions() const { return static_cast<int>(dirs_.size()); }

    int size() const { return static_cast<int>(nodes_.size()); }
    const GridNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const std::vector<GridNode>& nodes() const { return nodes_; }

    int imin() const { return imin_; }
    int jmin() const { return jmin_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    /// Interior node at lattice index (i, j), or -1.
    int node_at(int i, int j) const;
    Vec2 lattice_point(int i, int j) const { return {offset_.x + i * h_, offset_.y + j * h_}; }

    const StencilArm& arm(int node, int dir) const {
        return arms_[static_cast<std::size_t>(node) * dirs_.size() + static_cast<std::size_t>(dir)];
    }
    int axis_x() const { return axis_x_; }
    int axis_y() const { return axis_y_; }
    /// Some 4-neighbor of the node is not an interior node.
    bool near_boundary(int node) const { return near_boundary_[static_cast<std::size_t>(node)] != 0; }

private:
    friend std::shared_ptr<const Grid2D> build_grid(const DomainSpec&, double, const StencilConfig&, Vec2);

    double h_ = 0.0;
    Vec2 offset_;
    DomainSpec domain_;
    std::vector<LatticeDir> dirs_;
    std::vector<GridNode> nodes_;
    std::vector<int> index_;
    int imin_ = 0, jmin_ = 0, nx_ = 0, ny_ = 0;
    std::vector<StencilArm> arms_;
    std::vector<char> near_boundary_;
    int axis_x_ = 0, axis_y_ = 0;
};

using GridPtr = std::shared_ptr<const Grid2D>;

/// Classifies lattice nodes and computes boundary fractions per direction
/// by closed-form intersection with the boundary. Throws GridError when no
/// interior node exists.
GridPtr build_grid(const DomainSpec& dom, double h, const StencilConfig& st = {}, Vec2 offset = {});

/// Node values on the interior of a grid; the boundary value is 0.
struct ScalarField {
    GridPtr grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(GridPtr g, double fill = 0.0);
    ScalarField(GridPtr g, std::vector<double> v);

    static ScalarField sample(GridPtr g, const std::function<double(Vec2)>& fn);

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int k) { return values[static_cast<std::size_t>(k)]; }
    double operator[](int k) const { return values[static_cast<std::size_t>(k)]; }
    double sup_norm() const;
    double max() const;
    double min() const;
    ScalarField operator-(const ScalarField& o) const;
    ScalarField operator+(const ScalarField& o) const;
    ScalarField scaled(double t) const;
};

/// Value at an arbitrary point. Away from the boundary this is tensor cubic
/// Lagrange interpolation; where the 4x4 patch is incomplete it falls back
/// to a least-squares quadratic fit on nearby interior nodes. Points outside
/// the domain return 0 and lattice nodes return their own value.
double interpolate(const ScalarField& u, Vec2 p);

/// Bilinear value; exterior corners count as 0.
double interpolate_bilinear(const ScalarField& u, Vec2 p);

/// Transfer to another grid by bilinear interpolation.
ScalarField transfer(const ScalarField& u, GridPtr target);

/// Restriction to a grid on the same lattice whose nodes are a subset.
std::vector<double> restrict_to(const ScalarField& u, const Grid2D& sub);

/// Text snapshot: header `h=<h> nx=<nx> ny=<ny> kind=<kind>` followed by
/// `i j x y value` per interior node, 17 significant digits.
void write_snapshot(std::ostream& os, const ScalarField& u);
void write_snapshot(const std::string& path, const ScalarField& u);

struct SnapshotEntry {
    int i = 0;
    int j = 0;
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
};

struct Snapshot {
    double h = 0.0;
    int nx = 0;
    int ny = 0;
    std::string kind;
    std::vector<SnapshotEntry> entries;
};

Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::string& path);
/// Places snapshot values on a grid by position; nodes absent from the
/// snapshot get 0. Throws InputError when spacing or positions disagree.
ScalarField field_from_snapshot(const Snapshot& snap, GridPtr g);

}  // namespace pucci

namespace pucci {

/// Connected components (4-neighbor) of the nodes with |u| > band, grouped
/// by sign. Returns the component label per node (-1 inside the band).
std::vector<int> label_sign_regions(const ScalarField& u, double band, int& num_regions);

}  // namespace pucci
