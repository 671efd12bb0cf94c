#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>

#include "pucci/errors.hpp"
#include "pucci/grid.hpp"
#include "pucci/grid2d.hpp"
#include "pucci/harness.hpp"
#include "pucci/pucci_core.hpp"
#include "pucci/radial_spectra.hpp"
#include "pucci/semilinear.hpp"
#include "pucci/symmetry.hpp"

namespace py = pybind11;
using namespace pucci;

namespace {

SymMatrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw InputError("expected a square matrix");
    const int n = static_cast<int>(a.shape(0));
    return SymMatrix(n, std::vector<double>(a.data(), a.data() + n * n));
}

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict profile_dict(const RadialProfile& p) {
    py::dict d;
    d["r"] = to_array(p.radii);
    d["u"] = to_array(p.values);
    d["du"] = to_array(p.derivs);
    return d;
}

py::array_t<double> positions(const Grid2D& g) {
    py::array_t<double> out({g.size(), 2});
    auto m = out.mutable_unchecked<2>();
    for (int k = 0; k < g.size(); ++k) {
        m(k, 0) = g.node(k).pos.x;
        m(k, 1) = g.node(k).pos.y;
    }
    return out;
}

py::dict eigen_dict(const EigenResult& e) {
    py::dict d;
    d["lambda"] = e.lambda;
    d["lambda_lo"] = e.lambda_lo;
    d["lambda_hi"] = e.lambda_hi;
    d["residual"] = e.residual;
    d["iterations"] = e.iterations;
    d["zero_count"] = e.zero_count;
    if (std::holds_alternative<RadialProfile>(e.eigenfunction))
        d["profile"] = profile_dict(e.profile());
    else
        d["field"] = e.field();
    return d;
}

struct GridHandle {
    GridPtr ptr;
};

py::dict json_to_dict(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump()).cast<py::dict>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pucci operator spectra: pointwise operators, radial and grid eigenvalues, symmetry diagnostics.";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "PucciError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::enum_<Sign>(m, "Sign").value("plus", Sign::plus).value("minus", Sign::minus);
    py::enum_<Cone>(m, "Cone").value("positive", Cone::positive).value("negative", Cone::negative);
    py::enum_<FssClass>(m, "FssClass")
        .value("radial", FssClass::radial)
        .value("foliated_schwarz", FssClass::foliated_schwarz)
        .value("not_fss", FssClass::not_fss);
    py::enum_<FamilyKind>(m, "FamilyKind").value("caps", FamilyKind::caps).value("concentric", FamilyKind::concentric);

    py::class_<EllipticityPair>(m, "EllipticityPair")
        .def(py::init<double, double>(), py::arg("alpha") = 1.0, py::arg("beta") = 1.0)
        .def_readonly("alpha", &EllipticityPair::alpha)
        .def_readonly("beta", &EllipticityPair::beta)
        .def("__repr__", [](const EllipticityPair& e) {
            return "EllipticityPair(" + std::to_string(e.alpha) + ", " + std::to_string(e.beta) + ")";
        });

    m.def("sym_eigenvalues", [](const py::array_t<double>& a) { return sym_eigenvalues(to_matrix(a)); });
    m.def("pucci_plus",
          [](const py::array_t<double>& a, const EllipticityPair& e) { return pucci_plus(to_matrix(a), e); });
    m.def("pucci_minus",
          [](const py::array_t<double>& a, const EllipticityPair& e) { return pucci_minus(to_matrix(a), e); });
    m.def(
        "pucci_sup_oracle",
        [](const py::array_t<double>& a, const EllipticityPair& e, int frames, std::uint64_t seed) {
            return pucci_sup_oracle(to_matrix(a), e, frames, seed);
        },
        py::arg("m"), py::arg("ell"), py::arg("num_frames") = 1000, py::arg("seed") = 42);

    py::class_<RadialDomain>(m, "RadialDomain")
        .def_static("ball", &RadialDomain::ball, py::arg("radius") = 1.0, py::arg("dim") = 2)
        .def_static("annulus", &RadialDomain::annulus, py::arg("inner"), py::arg("outer"), py::arg("dim") = 2)
        .def_readonly("r_inner", &RadialDomain::r_inner)
        .def_readonly("r_outer", &RadialDomain::r_outer)
        .def_readonly("dim", &RadialDomain::dim);

    m.def(
        "principal_eigenvalue_radial",
        [](const RadialDomain& d, const EllipticityPair& e, double c0, Sign s, Cone c) {
            return eigen_dict(principal_eigenvalue_radial(d, e, c0, s, c));
        },
        py::arg("dom"), py::arg("ell"), py::arg("c0") = 0.0, py::arg("sign") = Sign::plus,
        py::arg("cone") = Cone::positive);
    m.def(
        "radial_nodal_eigenvalue",
        [](const RadialDomain& d, const EllipticityPair& e, double c0, Sign s, int zeros) {
            return eigen_dict(radial_nodal_eigenvalue(d, e, c0, s, zeros));
        },
        py::arg("dom"), py::arg("ell"), py::arg("c0") = 0.0, py::arg("sign") = Sign::plus,
        py::arg("interior_zeros") = 1);

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<double, double>())
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y);

    py::class_<DomainSpec>(m, "DomainSpec")
        .def_static("disc", &DomainSpec::disc, py::arg("radius") = 1.0)
        .def_static("annulus", &DomainSpec::annulus, py::arg("inner"), py::arg("outer"))
        .def_static(
            "cap_disc",
            [](double r, double ex, double ey) { return DomainSpec::cap_disc(r, Vec2{ex, ey}.normalized()); },
            py::arg("radius"), py::arg("ex"), py::arg("ey"))
        .def_static(
            "cap_annulus",
            [](double a, double b, double ex, double ey) {
                return DomainSpec::cap_annulus(a, b, Vec2{ex, ey}.normalized());
            },
            py::arg("inner"), py::arg("outer"), py::arg("ex"), py::arg("ey"))
        .def_static("rectangle", &DomainSpec::rectangle, py::arg("a"), py::arg("b"))
        .def_static("ellipse", &DomainSpec::ellipse, py::arg("a"), py::arg("b"))
        .def("__repr__", &DomainSpec::describe);

    py::class_<GridHandle>(m, "Grid")
        .def_property_readonly("h", [](const GridHandle& g) { return g.ptr->h(); })
        .def_property_readonly("size", [](const GridHandle& g) { return g.ptr->size(); })
        .def_property_readonly("num_directions", [](const GridHandle& g) { return g.ptr->num_directions(); })
        .def("positions", [](const GridHandle& g) { return positions(*g.ptr); })
        .def("__len__", [](const GridHandle& g) { return g.ptr->size(); });
    m.def(
        "build_grid",
        [](const DomainSpec& d, double h, int directions) {
            return GridHandle{build_grid(d, h, StencilConfig{directions})};
        },
        py::arg("dom"), py::arg("h"), py::arg("directions") = 16);

    py::class_<ScalarField>(m, "Field")
        .def(py::init([](const GridHandle& g, const std::vector<double>& v) { return ScalarField(g.ptr, v); }))
        .def_property_readonly("grid", [](const ScalarField& f) { return GridHandle{f.grid}; })
        .def_property_readonly("values", [](const ScalarField& f) { return to_array(f.values); })
        .def("sup_norm", &ScalarField::sup_norm)
        .def("__call__", [](const ScalarField& f, double x, double y) { return interpolate(f, {x, y}); })
        .def("__len__", &ScalarField::size);

    m.def(
        "discrete_pucci",
        [](const ScalarField& u, const EllipticityPair& e, Sign s) { return discrete_pucci(u, e, s); }, py::arg("u"),
        py::arg("ell"), py::arg("sign") = Sign::plus);
    m.def(
        "solve_dirichlet",
        [](const ScalarField& rhs, const EllipticityPair& e, Sign s, double c, double shift) {
            return solve_dirichlet(ScalarField(rhs.grid, c), shift, rhs, e, s);
        },
        py::arg("rhs"), py::arg("ell"), py::arg("sign") = Sign::plus, py::arg("c") = 0.0, py::arg("shift") = 0.0);
    m.def(
        "principal_eigenvalue_grid",
        [](const GridHandle& g, const EllipticityPair& e, double c, Sign s, Cone cone) {
            return eigen_dict(principal_eigenvalue_grid(Potential(c), g.ptr, e, s, cone));
        },
        py::arg("grid"), py::arg("ell"), py::arg("c") = 0.0, py::arg("sign") = Sign::plus,
        py::arg("cone") = Cone::positive);
    m.def(
        "nodal_candidate_refine",
        [](double lambda0, const ScalarField& psi0, const EllipticityPair& e, double c, Sign s) {
            const RefineOutcome out = nodal_candidate_refine(lambda0, psi0, Potential(c), e, s);
            py::dict d = eigen_dict(out.result);
            d["converged"] = out.converged;
            d["message"] = out.message;
            return d;
        },
        py::arg("lambda0"), py::arg("psi0"), py::arg("ell"), py::arg("c") = 0.0, py::arg("sign") = Sign::plus);

    py::class_<NonlinearitySpec>(m, "Nonlinearity")
        .def(py::init([](double c0, double c1, double p, double c_p, double mu) {
                 NonlinearitySpec nl{c0, c1, p, c_p, mu};
                 nl.validate();
                 return nl;
             }),
             py::arg("c0") = 0.0, py::arg("c1") = 0.0, py::arg("p") = 1.0, py::arg("c_p") = 0.0, py::arg("mu") = 0.0)
        .def("f", &NonlinearitySpec::f)
        .def("df", &NonlinearitySpec::df)
        .def_property_readonly("is_convex", &NonlinearitySpec::is_convex);
    m.def(
        "solve_semilinear_radial",
        [](const RadialDomain& d, const EllipticityPair& e, const NonlinearitySpec& nl, Sign s, double slope,
           int zeros) { return profile_dict(solve_semilinear_radial(d, e, s, nl, slope, zeros)); },
        py::arg("dom"), py::arg("ell"), py::arg("nl"), py::arg("sign") = Sign::plus, py::arg("init_slope") = 1.0,
        py::arg("target_zeros") = 0);
    m.def(
        "solve_semilinear_grid",
        [](const GridHandle& g, const EllipticityPair& e, const NonlinearitySpec& nl, Sign s) {
            return solve_semilinear_grid(g.ptr, e, s, nl);
        },
        py::arg("grid"), py::arg("ell"), py::arg("nl"), py::arg("sign") = Sign::plus);
    m.def(
        "linearized_potential",
        [](const ScalarField& u, const NonlinearitySpec& nl) { return linearized_potential(u, nl); }, py::arg("u"),
        py::arg("nl"));

    m.def(
        "detect_fss",
        [](const ScalarField& u, int directions) {
            return json_to_dict(to_json(detect_fss(u, DirectionSet::uniform(directions))));
        },
        py::arg("u"), py::arg("directions") = 16);
    m.def(
        "nodal_analysis",
        [](const ScalarField& u, double band) { return json_to_dict(to_json(nodal_analysis(u, band))); }, py::arg("u"),
        py::arg("zero_band") = -1.0);
    m.def("angular_derivative", [](const ScalarField& u) { return angular_derivative(u); }, py::arg("u"));
    m.def(
        "reflection_gap",
        [](const ScalarField& u, double ex, double ey) {
            const ReflectionGap r = reflection_gap(u, Vec2{ex, ey}.normalized());
            py::dict d;
            d["sign"] = to_string(r.sign);
            d["w"] = r.w;
            d["min_w"] = r.min_w;
            d["max_w"] = r.max_w;
            d["tol"] = r.tol;
            return d;
        },
        py::arg("u"), py::arg("ex"), py::arg("ey"));
    m.def(
        "subsolution_residual",
        [](const ScalarField& v, const ScalarField& c, const EllipticityPair& e, Sign s) {
            return subsolution_residual(v, c, e, s);
        },
        py::arg("v"), py::arg("c"), py::arg("ell"), py::arg("sign") = Sign::plus);
    m.def(
        "mu2_family_estimate",
        [](const DomainSpec& d, double h, const EllipticityPair& e, FamilyKind k, int directions, int offsets,
           int radii) {
            FamilyOptions o;
            o.directions = directions;
            o.offsets = offsets;
            o.radii = radii;
            return json_to_dict(to_json(mu2_family_estimate(Potential(0.0), d, h, e, k, o)));
        },
        py::arg("dom"), py::arg("h"), py::arg("ell"), py::arg("family") = FamilyKind::caps, py::arg("directions") = 8,
        py::arg("offsets") = 5, py::arg("radii") = 9);
    m.def(
        "gamma2_family_estimate",
        [](const DomainSpec& d, double h, const EllipticityPair& e, FamilyKind k, int directions, int offsets,
           int radii) {
            FamilyOptions o;
            o.directions = directions;
            o.offsets = offsets;
            o.radii = radii;
            return json_to_dict(to_json(gamma2_family_estimate(Potential(0.0), d, h, e, k, o)));
        },
        py::arg("dom"), py::arg("h"), py::arg("ell"), py::arg("family") = FamilyKind::caps, py::arg("directions") = 8,
        py::arg("offsets") = 5, py::arg("radii") = 9);

    m.def(
        "run",
        [](const std::map<std::string, std::string>& settings) {
            Config raw;
            for (const auto& [k, v] : settings) raw.set(k, v);
            RunRecord r;
            {
                py::gil_scoped_release release;
                r = run(RunConfig::from_config(raw));
            }
            py::dict d = json_to_dict(r.scalar_json());
            d["status"] = r.status;
            d["message"] = r.message;
            return d;
        },
        py::arg("settings"));
}
