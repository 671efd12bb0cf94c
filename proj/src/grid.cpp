#include "pucci/grid.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "pucci/errors.hpp"

namespace pucci {

double LatticeDir::angle() const { return std::atan2(static_cast<double>(q), static_cast<double>(p)); }

std::vector<LatticeDir> stencil_directions(const StencilConfig& st) {
    const int k = st.num_directions;
    if (k == 2) return {{1, 0, 1.0}, {0, 1, 1.0}};
    for (int width = 1; width <= 32; ++width) {
        std::vector<LatticeDir> dirs;
        for (int q = 0; q <= width; ++q) {
            for (int p = -width; p <= width; ++p) {
                if (q == 0 && p <= 0) continue;
                if (std::gcd(std::abs(p), q) != 1) continue;
                dirs.push_back({p, q, std::hypot(static_cast<double>(p), static_cast<double>(q))});
            }
        }
        if (static_cast<int>(dirs.size()) == k) {
            std::sort(dirs.begin(), dirs.end(),
                      [](const LatticeDir& a, const LatticeDir& b) { return a.angle() < b.angle(); });
            return dirs;
        }
        if (static_cast<int>(dirs.size()) > k) break;
    }
    throw InputError("unsupported stencil direction count " + std::to_string(k) + " (use 2, 4, 8, 16, 24, 40, ...)");
}

int Grid2D::node_at(int i, int j) const {
    const int a = i - imin_;
    const int b = j - jmin_;
    if (a < 0 || b < 0 || a >= nx_ || b >= ny_) return -1;
    return index_[static_cast<std::size_t>(b) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(a)];
}

GridPtr build_grid(const DomainSpec& dom, double h, const StencilConfig& st, Vec2 offset) {
    dom.validate();
    if (!std::isfinite(h) || !(h > 0.0)) throw GridError("grid spacing must be positive");
    constexpr double kInsideEps = 1e-12;
    // Nodes closer than this fraction of a step to the boundary are treated
    // as boundary points; this keeps Shortley-Weller weights bounded.
    constexpr double kMinArm = 1e-6;

    auto g = std::make_shared<Grid2D>();
    g->h_ = h;
    g->offset_ = offset;
    g->domain_ = dom;
    g->dirs_ = stencil_directions(st);
    const auto& dirs = g->dirs_;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        if (dirs[k].p == 1 && dirs[k].q == 0) g->axis_x_ = static_cast<int>(k);
        if (dirs[k].p == 0 && dirs[k].q == 1) g->axis_y_ = static_cast<int>(k);
    }

    double xmin, xmax, ymin, ymax;
    dom.bounding_box(xmin, xmax, ymin, ymax);
    g->imin_ = static_cast<int>(std::floor((xmin - offset.x) / h)) - 1;
    g->jmin_ = static_cast<int>(std::floor((ymin - offset.y) / h)) - 1;
    const int imax = static_cast<int>(std::ceil((xmax - offset.x) / h)) + 1;
    const int jmax = static_cast<int>(std::ceil((ymax - offset.y) / h)) + 1;
    g->nx_ = imax - g->imin_ + 1;
    g->ny_ = jmax - g->jmin_ + 1;
    g->index_.assign(static_cast<std::size_t>(g->nx_) * static_cast<std::size_t>(g->ny_), -1);

    // Row-major ordering: j outer, i inner.
    for (int j = g->jmin_; j <= jmax; ++j) {
        for (int i = g->imin_; i <= imax; ++i) {
            const Vec2 p = g->lattice_point(i, j);
            if (!dom.contains(p, kInsideEps)) continue;
            bool too_close = false;
            for (const auto& d : dirs) {
                const Vec2 v{d.p * h, d.q * h};
                if (dom.first_exit(p, v) < kMinArm || dom.first_exit(p, v * -1.0) < kMinArm) {
                    too_close = true;
                    break;
                }
            }
            if (too_close) continue;
            const int id = static_cast<int>(g->nodes_.size());
            g->nodes_.push_back({i, j, p});
            g->index_[static_cast<std::size_t>(j - g->jmin_) * static_cast<std::size_t>(g->nx_) +
                      static_cast<std::size_t>(i - g->imin_)] = id;
        }
    }
    if (g->nodes_.empty()) throw GridError("grid has no interior nodes; spacing too coarse for " + dom.describe());

    const std::size_t nd = dirs.size();
    g->arms_.resize(g->nodes_.size() * nd);
    g->near_boundary_.assign(g->nodes_.size(), 0);
    for (std::size_t n = 0; n < g->nodes_.size(); ++n) {
        const GridNode& nd_ = g->nodes_[n];
        for (std::size_t k = 0; k < nd; ++k) {
            const auto& d = dirs[k];
            const Vec2 v{d.p * h, d.q * h};
            StencilArm a;
            const double sp = dom.first_exit(nd_.pos, v);
            if (sp <= 1.0) {
                a.s_plus = sp;
            } else {
                a.plus = g->node_at(nd_.i + d.p, nd_.j + d.q);
            }
            const double sm = dom.first_exit(nd_.pos, v * -1.0);
            if (sm <= 1.0) {
                a.s_minus = sm;
            } else {
                a.minus = g->node_at(nd_.i - d.p, nd_.j - d.q);
            }
            g->arms_[n * nd + k] = a;
        }
        const int i = nd_.i, j = nd_.j;
        if (g->node_at(i + 1, j) < 0 || g->node_at(i - 1, j) < 0 || g->node_at(i, j + 1) < 0 ||
            g->node_at(i, j - 1) < 0)
            g->near_boundary_[n] = 1;
    }
    return g;
}

ScalarField::ScalarField(GridPtr g, double fill)
    : grid(std::move(g)), values(static_cast<std::size_t>(grid->size()), fill) {}

ScalarField::ScalarField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid->size()) throw InputError("field length does not match grid");
}

ScalarField ScalarField::sample(GridPtr g, const std::function<double(Vec2)>& fn) {
    ScalarField f(g);
    for (int k = 0; k < g->size(); ++k) f[k] = fn(g->node(k).pos);
    return f;
}

double ScalarField::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }
double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }

ScalarField ScalarField::operator-(const ScalarField& o) const {
    if (o.grid != grid) throw InputError("fields live on different grids");
    ScalarField r = *this;
    for (std::size_t k = 0; k < values.size(); ++k) r.values[k] -= o.values[k];
    return r;
}

ScalarField ScalarField::operator+(const ScalarField& o) const {
    if (o.grid != grid) throw InputError("fields live on different grids");
    ScalarField r = *this;
    for (std::size_t k = 0; k < values.size(); ++k) r.values[k] += o.values[k];
    return r;
}

ScalarField ScalarField::scaled(double t) const {
    ScalarField r = *this;
    for (double& v : r.values) v *= t;
    return r;
}

namespace {

double lagrange4(double t, int m) {
    // Nodes at -1, 0, 1, 2.
    switch (m) {
        case 0:
            return -t * (t - 1.0) * (t - 2.0) / 6.0;
        case 1:
            return (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        case 2:
            return -(t + 1.0) * t * (t - 2.0) / 2.0;
        default:
            return (t + 1.0) * t * (t - 1.0) / 6.0;
    }
}

}  // namespace

double interpolate(const ScalarField& u, Vec2 p) {
    const Grid2D& g = *u.grid;
    if (!g.domain().contains(p)) return 0.0;
    const double h = g.h();
    const double xi = (p.x - g.origin_offset().x) / h;
    const double eta = (p.y - g.origin_offset().y) / h;
    const int i0 = static_cast<int>(std::floor(xi));
    const int j0 = static_cast<int>(std::floor(eta));
    const double tx = xi - i0;
    const double ty = eta - j0;

    const int in = static_cast<int>(std::lround(xi));
    const int jn = static_cast<int>(std::lround(eta));
    if (std::abs(xi - in) < 1e-9 && std::abs(eta - jn) < 1e-9) {
        const int id = g.node_at(in, jn);
        if (id >= 0) return u[id];
    }

    bool full = true;
    int ids[4][4];
    for (int b = 0; b < 4 && full; ++b)
        for (int a = 0; a < 4; ++a) {
            ids[b][a] = g.node_at(i0 - 1 + a, j0 - 1 + b);
            if (ids[b][a] < 0) {
                full = false;
                break;
            }
        }
    if (full) {
        double v = 0.0;
        for (int b = 0; b < 4; ++b) {
            const double wy = lagrange4(ty, b);
            for (int a = 0; a < 4; ++a) v += wy * lagrange4(tx, a) * u[ids[b][a]];
        }
        return v;
    }

    // Least-squares quadratic on nearby interior nodes, in local units.
    std::vector<std::array<double, 3>> pts;
    for (int radius = 2; radius <= 4 && pts.size() < 10; ++radius) {
        pts.clear();
        for (int b = -radius + 1; b <= radius; ++b)
            for (int a = -radius + 1; a <= radius; ++a) {
                const int id = g.node_at(i0 + a, j0 + b);
                if (id < 0) continue;
                pts.push_back({a - tx, b - ty, u[id]});
            }
    }
    const int ncoef = pts.size() >= 10 ? 6 : (pts.size() >= 3 ? 3 : 0);
    if (ncoef == 0) return pts.empty() ? 0.0 : pts.front()[2];
    Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), ncoef);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t r = 0; r < pts.size(); ++r) {
        const double x = pts[r][0], y = pts[r][1];
        const auto ri = static_cast<Eigen::Index>(r);
        a(ri, 0) = 1.0;
        a(ri, 1) = x;
        a(ri, 2) = y;
        if (ncoef == 6) {
            a(ri, 3) = x * x;
            a(ri, 4) = x * y;
            a(ri, 5) = y * y;
        }
        rhs(ri) = pts[r][2];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(rhs);
    return c(0);
}

double interpolate_bilinear(const ScalarField& u, Vec2 p) {
    const Grid2D& g = *u.grid;
    const double xi = (p.x - g.origin_offset().x) / g.h();
    const double eta = (p.y - g.origin_offset().y) / g.h();
    const int i0 = static_cast<int>(std::floor(xi));
    const int j0 = static_cast<int>(std::floor(eta));
    const double tx = xi - i0;
    const double ty = eta - j0;
    auto val = [&](int i, int j) {
        const int id = g.node_at(i, j);
        return id < 0 ? 0.0 : u[id];
    };
    return (1 - tx) * (1 - ty) * val(i0, j0) + tx * (1 - ty) * val(i0 + 1, j0) + (1 - tx) * ty * val(i0, j0 + 1) +
           tx * ty * val(i0 + 1, j0 + 1);
}

ScalarField transfer(const ScalarField& u, GridPtr target) {
    ScalarField r(target);
    for (int k = 0; k < target->size(); ++k) r[k] = interpolate_bilinear(u, target->node(k).pos);
    return r;
}

std::vector<double> restrict_to(const ScalarField& u, const Grid2D& sub) {
    const Grid2D& g = *u.grid;
    const double h = g.h();
    if (std::abs(sub.h() - h) > 1e-14 * h) throw InputError("restriction needs equal grid spacing");
    const Vec2 d = sub.origin_offset() - g.origin_offset();
    const double di = d.x / h, dj = d.y / h;
    const int si = static_cast<int>(std::lround(di));
    const int sj = static_cast<int>(std::lround(dj));
    if (std::abs(di - si) > 1e-9 || std::abs(dj - sj) > 1e-9) throw InputError("grids are on different lattices");
    std::vector<double> out(static_cast<std::size_t>(sub.size()));
    for (int k = 0; k < sub.size(); ++k) {
        const auto& n = sub.node(k);
        const int id = g.node_at(n.i + si, n.j + sj);
        if (id < 0) throw InputError("sub-grid node outside the field's grid");
        out[static_cast<std::size_t>(k)] = u[id];
    }
    return out;
}

void write_snapshot(std::ostream& os, const ScalarField& u) {
    const Grid2D& g = *u.grid;
    char buf[256];
    std::snprintf(buf, sizeof buf, "h=%.17g nx=%d ny=%d kind=%s\n", g.h(), g.nx(), g.ny(),
                  to_string(g.domain().kind).c_str());
    os << buf;
    for (int k = 0; k < g.size(); ++k) {
        const auto& n = g.node(k);
        std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g %.17g\n", n.i - g.imin(), n.j - g.jmin(), n.pos.x, n.pos.y,
                      u[k]);
        os << buf;
    }
}

void write_snapshot(const std::string& path, const ScalarField& u) {
    std::ofstream os(path);
    if (!os) throw InputError("cannot open snapshot file " + path);
    write_snapshot(os, u);
}

Snapshot read_snapshot(std::istream& is) {
    Snapshot s;
    std::string line;
    if (!std::getline(is, line)) throw InputError("empty snapshot");
    std::istringstream hs(line);
    std::string tok;
    bool have_h = false, have_nx = false, have_ny = false, have_kind = false;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw InputError("bad snapshot header token '" + tok + "'");
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "h")
            s.h = std::stod(val), have_h = true;
        else if (key == "nx")
            s.nx = std::stoi(val), have_nx = true;
        else if (key == "ny")
            s.ny = std::stoi(val), have_ny = true;
        else if (key == "kind")
            s.kind = val, have_kind = true;
        else
            throw InputError("unknown snapshot header key '" + key + "'");
    }
    if (!(have_h && have_nx && have_ny && have_kind)) throw InputError("incomplete snapshot header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        SnapshotEntry e;
        if (!(ls >> e.i >> e.j >> e.x >> e.y >> e.value)) throw InputError("bad snapshot line '" + line + "'");
        s.entries.push_back(e);
    }
    return s;
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot open snapshot file " + path);
    return read_snapshot(is);
}

ScalarField field_from_snapshot(const Snapshot& snap, GridPtr g) {
    if (std::abs(snap.h - g->h()) > 1e-12 * g->h()) throw InputError("snapshot spacing differs from grid");
    ScalarField f(g);
    for (const auto& e : snap.entries) {
        const int i = static_cast<int>(std::lround((e.x - g->origin_offset().x) / g->h()));
        const int j = static_cast<int>(std::lround((e.y - g->origin_offset().y) / g->h()));
        const int id = g->node_at(i, j);
        if (id < 0) throw InputError("snapshot node not interior to the grid");
        f[id] = e.value;
    }
    return f;
}

}  // namespace pucci

namespace pucci {

std::vector<int> label_sign_regions(const ScalarField& u, double band, int& num_regions) {
    const Grid2D& g = *u.grid;
    std::vector<int> label(static_cast<std::size_t>(g.size()), -1);
    num_regions = 0;
    std::vector<int> stack;
    static constexpr int di[4] = {1, -1, 0, 0};
    static constexpr int dj[4] = {0, 0, 1, -1};
    for (int start = 0; start < g.size(); ++start) {
        if (label[static_cast<std::size_t>(start)] >= 0 || std::abs(u[start]) <= band) continue;
        const bool positive = u[start] > 0.0;
        const int id = num_regions++;
        label[static_cast<std::size_t>(start)] = id;
        stack.assign(1, start);
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            const auto& n = g.node(cur);
            for (int d = 0; d < 4; ++d) {
                const int nb = g.node_at(n.i + di[d], n.j + dj[d]);
                if (nb < 0 || label[static_cast<std::size_t>(nb)] >= 0) continue;
                if (std::abs(u[nb]) <= band || (u[nb] > 0.0) != positive) continue;
                label[static_cast<std::size_t>(nb)] = id;
                stack.push_back(nb);
            }
        }
    }
    return label;
}

}  // namespace pucci
