// Python bindings for the main operations: the symbolic hierarchy, curve
// periods and normalization, arc tracing, the Floquet discriminant, and the
// Weierstrass special-function layer.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kdvspec/curve.hpp"
#include "kdvspec/elliptic.hpp"
#include "kdvspec/floquet.hpp"
#include "kdvspec/hierarchy.hpp"
#include "kdvspec/spectrum.hpp"

namespace py = pybind11;
using namespace kdvspec;

namespace {

struct PyPrepared {
    HyperellipticCurve curve;
    PeriodData periods;
};

PyPrepared prepare(const std::vector<cplx>& E, int basis_bound, double quad_tol) {
    auto c = HyperellipticCurve::create(E);
    auto p = normalize_lambda(c, quad_tol);
    b_periods_of_mean_g(c, p);
    symplectic_basis_search(c, p, basis_bound);
    return {std::move(c), std::move(p)};
}

py::dict arcs_to_dict(const SpectrumResult& r) {
    py::list arcs;
    for (const auto& a : r.arcs) {
        py::dict d;
        d["vertices"] = a.vertices;
        d["residuals"] = a.residuals;
        d["semi_infinite"] = a.semi_infinite;
        d["start_angle"] = a.start.angle;
        d["end_angle"] = a.end.angle;
        arcs.append(d);
    }
    py::list crossings;
    for (const auto& cr : r.crossings) {
        py::dict d;
        d["location"] = cr.location;
        d["multiplicity"] = cr.multiplicity;
        d["directions"] = cr.directions;
        crossings.append(d);
    }
    py::dict out;
    out["arcs"] = arcs;
    out["crossings"] = crossings;
    out["asymptote_level"] = r.asymptote_level;
    out["basis_verified"] = r.basis_verified;
    out["warnings"] = r.warnings;
    return out;
}

}  // namespace

PYBIND11_MODULE(_kdvspec, m) {
    m.doc() = "Spectra of Schrodinger operators with quasi-periodic algebro-geometric "
              "KdV potentials";

    // Symbolic hierarchy (text form; exact arithmetic stays on the C++ side).
    m.def("hierarchy_f", [](int l) { return f_sequence(l)[l].text(); }, py::arg("l"));
    m.def("hierarchy_skdv", [](int n) { return skdv(n).text(); }, py::arg("n"));
    m.def("hierarchy_F", [](int n) { return build_F(n).text(); }, py::arg("n"));
    m.def("hierarchy_H", [](int n) { return build_H(n).text(); }, py::arg("n"));
    m.def("verify_identities", [](int n) { return verify_core_identities(n).ok(); },
          py::arg("n"));
    m.def(
        "c_from_E",
        [](const std::vector<cplx>& E, int k) { return c_from_E(E, k); },
        py::arg("E"), py::arg("k"));

    py::class_<PyPrepared>(m, "Curve")
        .def(py::init([](const std::vector<cplx>& E, int basis_bound, double quad_tol) {
                 return prepare(E, basis_bound, quad_tol);
             }),
             py::arg("branch_points"), py::arg("basis_bound") = 3,
             py::arg("quad_tol") = 1e-10)
        .def_property_readonly("genus", [](const PyPrepared& p) { return p.curve.genus(); })
        .def_property_readonly("branch_points",
                               [](const PyPrepared& p) { return p.curve.branch_points(); })
        .def_property_readonly("lam", [](const PyPrepared& p) { return p.periods.lambda; })
        .def_property_readonly("mean_V", [](const PyPrepared& p) { return p.periods.mean_V; })
        .def_property_readonly("basis_verified",
                               [](const PyPrepared& p) { return p.periods.basis_verified; })
        .def("sqrt_R", [](const PyPrepared& p, cplx z) { return p.curve.sqrt_R(z); },
             py::arg("z"))
        .def("mean_g", [](const PyPrepared& p, cplx z) { return mean_g(p.curve, p.periods, z); },
             py::arg("z"))
        .def("phi",
             [](const PyPrepared& p, cplx z, int side) { return phi(p.curve, p.periods, z, side); },
             py::arg("z"), py::arg("side") = 1)
        .def("w",
             [](const PyPrepared& p, cplx z, int side) {
                 return w_complex(p.curve, p.periods, z, side);
             },
             py::arg("z"), py::arg("side") = 1)
        .def("branch_directions",
             [](const PyPrepared& p, int m) { return branch_directions(p.curve, p.periods, m).angles; },
             py::arg("m"))
        .def("trace",
             [](const PyPrepared& p, double rmax_factor, double trace_tol) {
                 TraceOptions opt;
                 opt.rmax_factor = rmax_factor;
                 opt.trace_tol = trace_tol;
                 return arcs_to_dict(trace_arcs(p.curve, p.periods, opt));
             },
             py::arg("rmax_factor") = 50.0, py::arg("trace_tol") = 1e-8)
        .def("to_json", [](const PyPrepared& p) { return p.curve.to_json(); });

    py::class_<LameScenario>(m, "LameScenario")
        .def_property_readonly("branch_points",
                               [](const LameScenario& s) {
                                   return std::vector<cplx>(s.E.begin(), s.E.end());
                               })
        .def_readonly("period", &LameScenario::period)
        .def_readonly("shift", &LameScenario::shift)
        .def_readonly("lambda1_expected", &LameScenario::lambda1_expected)
        .def_readonly("mean_V_expected", &LameScenario::mean_V_expected)
        .def("V", [](const LameScenario& s, double x) { return s.V(x); }, py::arg("x"));

    m.def(
        "lame",
        [](cplx omega1, cplx omega3, const std::string& variant, std::optional<cplx> shift) {
            LameVariant v = variant == "conjugate_pair" ? LameVariant::conjugate_pair
                                                        : LameVariant::standard;
            return lame_scenario(omega1, omega3, v, shift);
        },
        py::arg("omega1"), py::arg("omega3"), py::arg("variant") = "standard",
        py::arg("shift") = std::nullopt);

    m.def(
        "discriminant",
        [](double period, const std::function<cplx(double)>& V, cplx z, double tol) {
            auto p = PeriodicPotential::create(period, V);
            return discriminant(p, z, tol);
        },
        py::arg("period"), py::arg("V"), py::arg("z"), py::arg("tol") = 1e-10);
    m.def(
        "lame_discriminant",
        [](const LameScenario& s, cplx z, double tol) {
            auto p = PeriodicPotential::create(s.period, [s](double x) { return s.V(x); });
            return discriminant(p, z, tol);
        },
        py::arg("scenario"), py::arg("z"), py::arg("tol") = 1e-10);

    // Weierstrass layer.
    m.def(
        "wp",
        [](cplx omega1, cplx omega3, cplx u) {
            return wp(LatticeParams::create(omega1, omega3), u);
        },
        py::arg("omega1"), py::arg("omega3"), py::arg("u"));
    m.def(
        "wzeta",
        [](cplx omega1, cplx omega3, cplx u) {
            return wzeta(LatticeParams::create(omega1, omega3), u);
        },
        py::arg("omega1"), py::arg("omega3"), py::arg("u"));
    m.def("theta1", &theta_genus1, py::arg("z"), py::arg("tau"));
}
