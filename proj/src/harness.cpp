#include "pucci/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "harness_internal.hpp"
#include "pucci/errors.hpp"

namespace pucci {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- config

double RunConfig::real(const std::string& key) const { return parse_real(params.get(key)); }
long long RunConfig::integer(const std::string& key) const { return parse_integer(params.get(key)); }
bool RunConfig::boolean(const std::string& key) const { return parse_bool(params.get(key)); }
const std::string& RunConfig::text(const std::string& key) const { return params.get(key); }
std::vector<double> RunConfig::reals(const std::string& key) const { return parse_real_list(params.get(key)); }

namespace {

DomainSpec domain_from(const RunConfig& c) {
    const std::string& kind = c.text("domain.kind");
    const double r = c.real("domain.radius"), ri = c.real("domain.inner");
    const Vec2 e = unit_at_angle(c.real("domain.cut_angle"));
    DomainSpec d;
    if (kind == "disc" || kind == "ball")
        d = DomainSpec::disc(r);
    else if (kind == "annulus")
        d = DomainSpec::annulus(ri, r);
    else if (kind == "cap_disc")
        d = DomainSpec::cap_disc(r, e);
    else if (kind == "cap_annulus")
        d = DomainSpec::cap_annulus(ri, r, e);
    else if (kind == "rectangle")
        d = DomainSpec::rectangle(c.real("domain.a"), c.real("domain.b"));
    else
        d = DomainSpec::ellipse(c.real("domain.a"), c.real("domain.b"));
    d.validate();
    return d;
}

}  // namespace

RunConfig RunConfig::from_config(const Config& raw_in, const std::map<std::string, std::string>& overrides) {
    Config raw = raw_in;
    for (const auto& [k, v] : overrides) raw.set(k, v);
    RunConfig c;
    c.overrides = overrides;
    c.params = resolve_config(raw);
    if (!raw.has("run.out_dir")) c.params.set("run.out_dir", default_out_dir());
    std::vector<std::string> issues;
    c.experiment = c.text("run.experiment");
    try {
        c.domain = domain_from(c);
    } catch (const Error& e) {
        issues.push_back(std::string("domain: ") + e.what());
    }
    try {
        c.ell = EllipticityPair(c.real("ell.alpha"), c.real("ell.beta"));
    } catch (const Error& e) {
        issues.push_back(std::string("ell: ") + e.what());
    }
    c.h = c.real("grid.h");
    if (!(c.h > 0.0)) issues.push_back("key 'grid.h': must be > 0");
    const long long seed = c.integer("run.seed");
    if (seed < 0) issues.push_back("key 'run.seed': must be >= 0");
    c.seed = static_cast<std::uint64_t>(std::max(0LL, seed));
    c.workers = static_cast<int>(c.integer("run.workers"));
    if (c.workers < 1) issues.push_back("key 'run.workers': must be >= 1");
    if (c.integer("grid.directions") < 2) issues.push_back("key 'grid.directions': must be >= 2");
    c.out_dir = c.text("run.out_dir");
    bool any_nl = false;
    for (const auto& [k, v] : raw.values()) any_nl = any_nl || k.rfind("nl.", 0) == 0;
    NonlinearitySpec nl{c.real("nl.c0"), c.real("nl.c1"), c.real("nl.p"), c.real("nl.c_p"), c.real("nl.mu")};
    try {
        nl.validate();
        if (any_nl) c.nl = nl;
    } catch (const Error& e) {
        issues.push_back(std::string("nl: ") + e.what());
    }
    if (!issues.empty()) throw ConfigError(issues);
    return c;
}

std::string default_out_dir() {
    const char* env = std::getenv("PUCCI_SPECTRA_OUT");
    return env != nullptr && *env != '\0' ? std::string(env) : std::string("results");
}

// ---------------------------------------------------------------- record

void RunRecord::add(std::string name, double value, double error, std::string units) {
    results.push_back({std::move(name), value, error, std::move(units)});
}

const ScalarResult* RunRecord::find(const std::string& name) const {
    for (const auto& r : results)
        if (r.name == name) return &r;
    return nullptr;
}

void RunRecord::check(std::string name, bool passed, double margin, double error, std::string detail) {
    assertions.push_back({std::move(name), passed, margin, error, std::move(detail), false});
    if (!passed && status == exit_ok) status = exit_assertion;
}

void RunRecord::check_margin(std::string name, double margin, double error, std::string detail) {
    check(std::move(name), margin > 3.0 * error, margin, error, std::move(detail));
}

bool RunRecord::all_passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed || a.skipped; });
}

namespace {

json number(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

}  // namespace

json RunRecord::scalar_json() const {
    json j;
    j["version"] = kVersion;
    j["experiment"] = experiment;
    j["config"] = config;
    json res = json::array();
    for (const auto& r : results)
        res.push_back({{"name", r.name}, {"value", number(r.value)}, {"error", number(r.error)}, {"units", r.units}});
    j["results"] = res;
    json as = json::array();
    for (const auto& a : assertions)
        as.push_back({{"name", a.name},
                      {"passed", a.passed},
                      {"skipped", a.skipped},
                      {"margin", number(a.margin)},
                      {"error", number(a.error)},
                      {"detail", a.detail}});
    j["assertions"] = as;
    j["reports"] = reports;
    j["diagnostics"] = diagnostics;
    j["notes"] = notes;
    j["status"] = status;
    j["message"] = message;
    return j;
}

json RunRecord::to_json() const {
    json j = scalar_json();
    j["timings_ms"] = timings_ms;
    if (!run_dir.empty()) j["run_dir"] = run_dir;
    return j;
}

std::string results_csv(const RunRecord& r) {
    std::ostringstream os;
    os << "name,value,error,units\n";
    char buf[64];
    for (const auto& s : r.results) {
        os << s.name << ',';
        std::snprintf(buf, sizeof buf, "%.17g", s.value);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.17g", s.error);
        os << buf << ',' << s.units << '\n';
    }
    return os.str();
}

json to_json(const FssReport& r) {
    json j;
    j["classification"] = to_string(r.classification);
    j["axis_p"] = r.axis_p ? json::array({r.axis_p->x, r.axis_p->y}) : json(nullptr);
    json signs = json::array();
    for (std::size_t k = 0; k < r.directions.size(); ++k)
        signs.push_back({{"e", {r.directions[k].x, r.directions[k].y}}, {"sign", to_string(r.per_direction_sign[k])}});
    j["per_direction_sign"] = signs;
    j["max_violation"] = r.max_violation;
    j["tol"] = r.tol;
    j["sampling_resolution"] = r.sampling_resolution;
    j["axis_from_moment"] = r.axis_from_moment;
    return j;
}

json to_json(const NodalReport& r) {
    json j;
    json edges = json::array();
    for (const auto& e : r.sign_change_edges) edges.push_back({e.a, e.b});
    j["sign_change_edges"] = edges;
    j["touches_boundary"] = r.touches_boundary;
    j["contains_origin"] = r.contains_origin;
    j["num_nodal_regions"] = r.num_nodal_regions;
    j["num_positive_regions"] = r.num_positive_regions;
    j["num_negative_regions"] = r.num_negative_regions;
    j["zero_band"] = r.zero_band;
    j["regions_band_tenth"] = r.regions_band_tenth;
    j["regions_band_tenfold"] = r.regions_band_tenfold;
    return j;
}

json to_json(const NonlinearitySpec& nl) {
    return {{"c0", nl.c0}, {"c1", nl.c1}, {"p", nl.p}, {"c_p", nl.c_p}, {"mu", nl.mu}, {"is_convex", nl.is_convex()}};
}

json to_json(const FamilyEstimate& f) {
    return {{"value", f.value},
            {"minimizer", f.minimizer},
            {"lambda_inner", f.lambda_inner},
            {"lambda_outer", f.lambda_outer},
            {"members", f.members}};
}

// ---------------------------------------------------------------- helpers

namespace detail {

Pair grid_pair(const Potential& c, const DomainSpec& dom, double h, const EllipticityPair& ell, Sign sign, Cone cone,
               const StencilConfig& st) {
    Pair p;
    p.fine = principal_eigenvalue_grid(c, dom, h, ell, sign, cone, st);
    p.value = p.fine.lambda;
    p.coarse = principal_eigenvalue_grid(c, dom, 2.0 * h, ell, sign, cone, st).lambda;
    p.error = std::abs(p.value - p.coarse);
    p.extrapolated = richardson(p.coarse, p.value).extrapolated;
    return p;
}

Pair radial_pair(const RadialDomain& dom, const EllipticityPair& ell, double c0, Sign sign, Cone cone, double step) {
    RadialEigenOptions o;
    o.step = step > 0.0 ? step : default_radial_step(dom);
    Pair p;
    p.fine = principal_eigenvalue_radial(dom, ell, c0, sign, cone, o);
    p.value = p.fine.lambda;
    o.step *= 2.0;
    p.coarse = principal_eigenvalue_radial(dom, ell, c0, sign, cone, o).lambda;
    p.error = std::abs(p.value - p.coarse) + 1e-8 * (1.0 + std::abs(p.value));
    p.extrapolated = p.value;
    return p;
}

Pair radial_nodal_pair(const RadialDomain& dom, const EllipticityPair& ell, double c0, Sign sign, int zeros,
                       double step) {
    RadialEigenOptions o;
    o.step = step > 0.0 ? step : default_radial_step(dom);
    Pair p;
    p.fine = radial_nodal_eigenvalue(dom, ell, c0, sign, zeros, o);
    p.value = p.fine.lambda;
    o.step *= 2.0;
    p.coarse = radial_nodal_eigenvalue(dom, ell, c0, sign, zeros, o).lambda;
    p.error = std::abs(p.value - p.coarse) + 1e-8 * (1.0 + std::abs(p.value));
    p.extrapolated = p.value;
    return p;
}

RadialDomain radial_domain_of(const DomainSpec& dom) {
    if (!dom.is_radial()) throw DomainError("radial computations need a disc or annulus: " + dom.describe());
    return dom.kind == DomainKind::disc ? RadialDomain::ball(dom.r_outer)
                                        : RadialDomain::annulus(dom.r_inner, dom.r_outer);
}

double bump(const DomainSpec& dom, Vec2 x) {
    switch (dom.kind) {
        case DomainKind::annulus:
        case DomainKind::cap_annulus: {
            const double r = x.norm();
            return std::max(0.0, (r - dom.r_inner) * (dom.r_outer - r)) * 4.0 /
                   ((dom.r_outer - dom.r_inner) * (dom.r_outer - dom.r_inner));
        }
        case DomainKind::rectangle:
            return std::max(
                0.0, (1.0 - x.x * x.x / (dom.half_x * dom.half_x)) * (1.0 - x.y * x.y / (dom.half_y * dom.half_y)));
        case DomainKind::ellipse:
            return std::max(0.0, 1.0 - x.x * x.x / (dom.half_x * dom.half_x) - x.y * x.y / (dom.half_y * dom.half_y));
        default:
            return std::max(0.0, 1.0 - x.dot(x) / (dom.r_outer * dom.r_outer));
    }
}

double doubly_symmetric_field(double a, double b, Vec2 x) {
    const double pi = std::numbers::pi;
    return std::cos(1.5 * pi * x.x / a) * std::cos(0.5 * pi * x.y / b) +
           std::cos(0.5 * pi * x.x / a) * std::cos(1.5 * pi * x.y / b);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

using namespace detail;

// ---------------------------------------------------------------- experiments

namespace {

class PhaseTimer {
public:
    PhaseTimer(RunRecord& r, std::string name)
        : rec_(r), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
    ~PhaseTimer() {
        rec_.timings_ms[name_] +=
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    RunRecord& rec_;
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

Sign sign_of(const RunConfig& c) { return c.text("eig.sign") == "minus" ? Sign::minus : Sign::plus; }

std::vector<Cone> cones_of(const RunConfig& c) {
    const std::string& s = c.text("eig.cone");
    if (s == "positive") return {Cone::positive};
    if (s == "negative") return {Cone::negative};
    return {Cone::positive, Cone::negative};
}

StencilConfig stencil_of(const RunConfig& c) { return {static_cast<int>(c.integer("grid.directions"))}; }

SymMatrix parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::string row;
    std::istringstream in(text);
    while (std::getline(in, row, ';')) rows.push_back(parse_real_list(row));
    const std::size_t n = rows.size();
    std::vector<double> entries;
    for (const auto& r : rows) {
        if (r.size() != n) throw InputError("eval.matrix must be square");
        entries.insert(entries.end(), r.begin(), r.end());
    }
    return SymMatrix(static_cast<int>(n), entries);
}

void experiment_eval(const RunConfig& c, RunRecord& r) {
    PhaseTimer t(r, "eval");
    const SymMatrix m = parse_matrix(c.text("eval.matrix"));
    const double fro = m.frobenius_norm();
    const double plus = pucci_plus(m, c.ell), minus = pucci_minus(m, c.ell);
    r.add("pucci_plus", plus);
    r.add("pucci_minus", minus);
    const auto eig = sym_eigenvalues(m);
    for (std::size_t k = 0; k < eig.size(); ++k) r.add("eigenvalue_" + std::to_string(k), eig[k]);
    const int frames = static_cast<int>(c.integer("eval.frames"));
    const double oracle = pucci_sup_oracle(m, c.ell, frames, c.seed);
    r.add("oracle_plus", oracle);
    r.add("oracle_gap", plus - oracle);
    const double dual = std::abs(plus + pucci_minus(-m, c.ell));
    r.add("duality_residual", dual);
    r.check("oracle_within_bounds", plus - oracle >= -1e-12 * (1.0 + fro), plus - oracle, 1e-12 * (1.0 + fro),
            "0 <= pucci_plus - oracle");
    r.check("duality", dual <= 1e-12 * (1.0 + fro), dual, 1e-12 * (1.0 + fro), "|M+(M) + M-(-M)|");
}

std::string profile_csv(const std::vector<std::pair<std::string, RadialProfile>>& cols) {
    std::ostringstream os;
    os << "r";
    for (const auto& c : cols) os << ',' << c.first;
    os << '\n';
    if (cols.empty()) return os.str();
    const RadialProfile& base = cols.front().second;
    const std::size_t stride = std::max<std::size_t>(1, base.size() / 500);
    char buf[64];
    for (std::size_t i = 0; i < base.size(); i += stride) {
        std::snprintf(buf, sizeof buf, "%.10g", base.radii[i]);
        os << buf;
        for (const auto& c : cols) {
            std::snprintf(buf, sizeof buf, "%.10g", c.second.at(base.radii[i]));
            os << ',' << buf;
        }
        os << '\n';
    }
    return os.str();
}

void experiment_radial_eig(const RunConfig& c, RunRecord& r) {
    PhaseTimer t(r, "radial-eig");
    const RadialDomain dom = radial_domain_of(c.domain);
    const Sign sign = sign_of(c);
    const double c0 = c.real("eig.c0"), step = c.real("eig.step");
    std::vector<std::pair<std::string, RadialProfile>> cols;
    for (Cone cone : cones_of(c)) {
        const Pair p = radial_pair(dom, c.ell, c0, sign, cone, step);
        const std::string name = cone == Cone::positive ? "lambda1_plus" : "lambda1_minus";
        r.add(name, p.value, p.error);
        r.diagnostics[name] = {{"residual", p.fine.residual}, {"iterations", p.fine.iterations}};
        cols.emplace_back(name, p.fine.profile());
    }
    for (int k = 1; k <= c.integer("eig.zeros"); ++k) {
        const Pair p = radial_nodal_pair(dom, c.ell, c0, sign, k, step);
        const std::string name = "lambda_radial_" + std::to_string(k + 1);
        r.add(name, p.value, p.error);
        r.diagnostics[name] = {{"residual", p.fine.residual}, {"cone", to_string(p.fine.cone)}};
        cols.emplace_back(name, p.fine.profile());
    }
    r.files["profiles.csv"] = profile_csv(cols);
}

void experiment_grid_eig(const RunConfig& c, RunRecord& r) {
    const Sign sign = sign_of(c);
    const Potential pot(c.real("eig.c0"));
    const StencilConfig st = stencil_of(c);
    for (Cone cone : cones_of(c)) {
        PhaseTimer t(r, "grid-eig-" + to_string(cone));
        const Pair p = grid_pair(pot, c.domain, c.h, c.ell, sign, cone, st);
        const std::string name = cone == Cone::positive ? "lambda1_plus" : "lambda1_minus";
        r.add(name, p.value, p.error);
        r.add(name + "_extrapolated", p.extrapolated, p.error);
        r.diagnostics[name] = {{"bracket", {p.fine.lambda_lo, p.fine.lambda_hi}},
                               {"iterations", p.fine.iterations},
                               {"residual", p.fine.residual},
                               {"nodes", p.fine.field().size()}};
        r.snapshots.push_back({name, p.fine.field()});
    }
    const std::string fam = c.text("eig.family");
    if (fam != "none") {
        PhaseTimer t(r, "family");
        FamilyOptions fo;
        fo.directions = static_cast<int>(c.integer("family.directions"));
        fo.offsets = static_cast<int>(c.integer("family.offsets"));
        fo.radii = static_cast<int>(c.integer("family.radii"));
        fo.stencil = st;
        const FamilyKind kind = family_kind_from_string(fam);
        const auto m1 = mu2_family_estimate(pot, c.domain, c.h, c.ell, kind, fo);
        const auto m2 = mu2_family_estimate(pot, c.domain, 2.0 * c.h, c.ell, kind, fo);
        const auto g1 = gamma2_family_estimate(pot, c.domain, c.h, c.ell, kind, fo);
        const auto g2 = gamma2_family_estimate(pot, c.domain, 2.0 * c.h, c.ell, kind, fo);
        r.add("mu2_family", m1.value, std::abs(m1.value - m2.value));
        r.add("gamma2_family", g1.value, std::abs(g1.value - g2.value));
        r.reports["mu2_family"] = to_json(m1);
        r.reports["gamma2_family"] = to_json(g1);
        r.check("gamma2_dominates_mu2", g1.value >= m1.value, g1.value - m1.value,
                std::abs(m1.value - m2.value) + std::abs(g1.value - g2.value));
    }
}

ScalarField initial_guess(const RunConfig& c, const GridPtr& g) {
    const double a = c.real("solve.initial_amplitude");
    if (a == 0.0) return ScalarField(g);
    const DomainSpec dom = c.domain;
    return ScalarField::sample(g, [&](Vec2 x) { return a * bump(dom, x); });
}

NonlinearitySpec default_nl(const RunConfig& c) { return c.nl ? *c.nl : NonlinearitySpec{1.0, 0.1, 1.0, 0.0, 0.0}; }

ScalarField solve_into(const RunConfig& c, RunRecord& r, const GridPtr& g, const NonlinearitySpec& nl) {
    PhaseTimer t(r, "solve");
    SemilinearStats stats;
    ScalarField u = solve_semilinear_grid(g, c.ell, Sign::plus, nl, initial_guess(c, g), &stats);
    r.add("u_max", u.max());
    r.add("u_min", u.min());
    if (c.domain.contains_origin()) r.add("u_origin", interpolate(u, {0.0, 0.0}));
    r.add("residual", stats.residual);
    r.diagnostics["solve"] = {{"iterations", stats.iterations}, {"residual_history", stats.residual_history}};
    r.reports["nonlinearity"] = to_json(nl);
    return u;
}

void analyse_field(const RunConfig& c, RunRecord& r, const ScalarField& u) {
    PhaseTimer t(r, "analysis");
    const NodalReport nr = nodal_analysis(u, c.real("symmetry.zero_band"));
    r.reports["nodal"] = to_json(nr);
    r.add("num_nodal_regions", nr.num_nodal_regions);
    if (c.domain.is_radial()) {
        const FssReport fr = detect_fss(u, DirectionSet::uniform(static_cast<int>(c.integer("symmetry.directions"))));
        r.reports["fss"] = to_json(fr);
        r.add("fss_max_violation", fr.max_violation, fr.tol);
        const ScalarField ut = angular_derivative(u);
        r.add("angular_derivative_max", ut.sup_norm());
    }
}

void experiment_solve(const RunConfig& c, RunRecord& r) {
    const NonlinearitySpec nl = default_nl(c);
    GridPtr g = build_grid(c.domain, c.h, stencil_of(c));
    ScalarField u = solve_into(c, r, g, nl);
    r.snapshots.push_back({"u", u});
    {
        PhaseTimer t(r, "linearized-eig");
        const auto e =
            principal_eigenvalue_grid(Potential(linearized_potential(u, nl)), g, c.ell, Sign::plus, Cone::positive);
        r.add("lambda1_plus_linearized", e.lambda, e.lambda_hi - e.lambda_lo);
    }
    if (c.domain.is_radial()) {
        PhaseTimer t(r, "radial-solve");
        const RadialDomain rd = radial_domain_of(c.domain);
        try {
            const RadialProfile p = solve_semilinear_radial(rd, c.ell, Sign::plus, nl, c.real("solve.init_slope"),
                                                            static_cast<int>(c.integer("solve.target_zeros")));
            r.add("radial_u_max", p.sup_norm());
            r.add("radial_u_inner", p.values.front());
            r.files["radial_profile.csv"] = profile_csv({{"u", p}});
        } catch (const NoSolutionFound& e) {
            r.notes.push_back(std::string("radial shooting: ") + e.what());
        }
    }
    analyse_field(c, r, u);
}

void experiment_symmetry(const RunConfig& c, RunRecord& r) {
    const std::string& which = c.text("symmetry.field");
    GridPtr g = build_grid(c.domain, c.h, stencil_of(c));
    ScalarField u;
    if (which == "solve") {
        u = solve_into(c, r, g, default_nl(c));
    } else if (which == "eigen") {
        const auto e = principal_eigenvalue_grid(Potential(c.real("eig.c0")), g, c.ell, Sign::plus, Cone::positive);
        r.add("lambda1_plus", e.lambda, e.lambda_hi - e.lambda_lo);
        u = e.field();
    } else {
        const DomainSpec dom = c.domain;
        double a = 1.0, b = 1.0;
        if (dom.kind == DomainKind::rectangle || dom.kind == DomainKind::ellipse) {
            a = dom.half_x;
            b = dom.half_y;
        }
        const double R = dom.r_outer;
        u = ScalarField::sample(g, [&](Vec2 x) {
            if (which == "gaussian") return std::exp(-x.dot(x));
            if (which == "x1") return x.x * (1.0 - x.dot(x) / (R * R));
            if (which == "x1x2") return x.x * x.y * (1.0 - x.dot(x) / (R * R));
            return doubly_symmetric_field(a, b, x);
        });
    }
    r.snapshots.push_back({"u", u});
    analyse_field(c, r, u);
}

std::string summary_csv(const std::vector<double>& values, const std::vector<RunRecord>& runs) {
    std::ostringstream os;
    os << "axis_value,name,value,error,units\n";
    char buf[64];
    for (std::size_t k = 0; k < runs.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", values[k]);
        const std::string av = buf;
        if (runs[k].status != exit_ok && runs[k].results.empty()) os << av << ",status," << runs[k].status << ",0,\n";
        for (const auto& s : runs[k].results) {
            os << av << ',' << s.name << ',';
            std::snprintf(buf, sizeof buf, "%.17g", s.value);
            os << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", s.error);
            os << buf << ',' << s.units << '\n';
        }
    }
    return os.str();
}

RunRecord run_impl(const RunConfig& cfg, bool write_subruns, const std::string& sweep_dir);

}  // namespace

RunRecord run(const RunConfig& cfg) { return run_impl(cfg, false, ""); }

namespace {

RunRecord run_impl(const RunConfig& cfg, bool write_subruns, const std::string& sweep_dir) {
    RunRecord r;
    r.experiment = cfg.experiment;
    r.config = cfg.params.values();
    try {
        if (cfg.experiment == "eval")
            experiment_eval(cfg, r);
        else if (cfg.experiment == "radial-eig")
            experiment_radial_eig(cfg, r);
        else if (cfg.experiment == "grid-eig")
            experiment_grid_eig(cfg, r);
        else if (cfg.experiment == "solve")
            experiment_solve(cfg, r);
        else if (cfg.experiment == "symmetry")
            experiment_symmetry(cfg, r);
        else if (cfg.experiment == "verify-paper") {
            RunRecord s = verify_paper_suite(cfg.text("suite.name"), cfg);
            s.config = r.config;
            s.experiment = r.experiment;
            return s;
        } else if (cfg.experiment == "sweep") {
            RunConfig base = cfg;
            base.experiment = cfg.text("sweep.experiment");
            base.params.set("run.experiment", base.experiment);
            SweepResult sw;
            const auto values = cfg.reals("sweep.values");
            sw = sweep(base, cfg.text("sweep.axis"), values, write_subruns);
            (void)sweep_dir;
            for (std::size_t k = 0; k < sw.runs.size(); ++k) {
                const std::string tag = "[" + cfg.text("sweep.axis") + "=" + fmt(values[k]) + "] ";
                for (const auto& s : sw.runs[k].results) r.add(tag + s.name, s.value, s.error, s.units);
                for (auto a : sw.runs[k].assertions) {
                    a.name = tag + a.name;
                    r.assertions.push_back(a);
                }
                r.status = std::max(r.status, sw.runs[k].status);
            }
            r.diagnostics["rows"] = sw.runs.size();
            r.files["summary.csv"] = sw.summary_csv;
        } else {
            throw ConfigError({"unknown experiment '" + cfg.experiment + "'"});
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InputError& e) {
        r.status = exit_config;
        r.message = e.what();
    } catch (const DomainError& e) {
        r.status = exit_config;
        r.message = e.what();
    } catch (const GridError& e) {
        r.status = exit_config;
        r.message = e.what();
    } catch (const Error& e) {
        r.status = exit_solver;
        r.message = e.what();
    }
    return r;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    out << s;
}

}  // namespace

std::string write_record(RunRecord& r, const std::string& parent, std::uint64_t seed) {
    fs::create_directories(parent);
    const std::string stem = timestamp() + "-" + std::to_string(seed);
    fs::path dir = fs::path(parent) / stem;
    for (int k = 1; fs::exists(dir); ++k) dir = fs::path(parent) / (stem + "-" + std::to_string(k));
    fs::create_directories(dir);
    r.run_dir = dir.string();
    for (const auto& s : r.snapshots) write_snapshot((dir / (s.name + ".snapshot.txt")).string(), s.field);
    for (const auto& [name, content] : r.files) write_text(dir / name, content);
    write_text(dir / "results.csv", results_csv(r));
    write_text(dir / "record.json", r.to_json().dump(2) + "\n");
    return dir.string();
}

RunRecord run_and_write(const RunConfig& cfg) {
    const fs::path parent = fs::path(cfg.out_dir) / cfg.experiment;
    if (cfg.experiment != "sweep") {
        RunRecord r = run(cfg);
        if (!cfg.boolean("run.snapshots")) r.snapshots.clear();
        write_record(r, parent.string(), cfg.seed);
        return r;
    }
    // Sweep runs persist below the sweep directory.
    fs::create_directories(parent);
    RunConfig c = cfg;
    const std::string stem = timestamp() + "-" + std::to_string(cfg.seed);
    fs::path dir = parent / stem;
    for (int k = 1; fs::exists(dir); ++k) dir = parent / (stem + "-" + std::to_string(k));
    c.out_dir = dir.string();
    RunRecord r = run_impl(c, true, dir.string());
    fs::create_directories(dir);
    r.run_dir = dir.string();
    for (const auto& [name, content] : r.files) write_text(dir / name, content);
    write_text(dir / "results.csv", results_csv(r));
    write_text(dir / "record.json", r.to_json().dump(2) + "\n");
    return r;
}

SweepResult sweep(const RunConfig& base, const std::string& axis, const std::vector<double>& values, bool write) {
    SweepResult out;
    out.values = values;
    out.runs.resize(values.size());
    if (values.empty()) {
        out.summary_csv = summary_csv(values, out.runs);
        return out;
    }
    const auto& schema = config_schema();
    const auto it = std::find_if(schema.begin(), schema.end(), [&](const KeySpec& s) { return s.key == axis; });
    if (it == schema.end() || (it->type != KeyType::real && it->type != KeyType::integer))
        throw ConfigError({"sweep axis '" + axis + "' is not a numeric key"});

    std::atomic<std::size_t> next{0};
    std::mutex write_mutex;
    auto worker = [&]() {
        for (std::size_t k = next++; k < values.size(); k = next++) {
            RunRecord rec;
            try {
                std::map<std::string, std::string> ov = base.overrides;
                char buf[64];
                if (it->type == KeyType::integer)
                    std::snprintf(buf, sizeof buf, "%lld", std::llround(values[k]));
                else
                    std::snprintf(buf, sizeof buf, "%.17g", values[k]);
                ov[axis] = buf;
                Config raw = base.params;
                RunConfig c = RunConfig::from_config(raw, ov);
                c.experiment = base.experiment;
                rec = run(c);
                if (write) {
                    if (!c.boolean("run.snapshots")) rec.snapshots.clear();
                    std::lock_guard<std::mutex> lock(write_mutex);
                    write_record(rec, (fs::path(base.out_dir) / ("run_" + std::to_string(k))).string(), c.seed);
                }
            } catch (const ConfigError& e) {
                rec.status = exit_config;
                rec.message = e.what();
            }
            rec.snapshots.clear();
            out.runs[k] = std::move(rec);
        }
    };
    const int nthreads = std::max(1, std::min<int>(base.workers, static_cast<int>(values.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    out.summary_csv = summary_csv(values, out.runs);
    return out;
}

}  // namespace pucci
