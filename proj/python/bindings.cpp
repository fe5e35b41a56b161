#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ptdirac/cli.hpp"
#include "ptdirac/closedform.hpp"
#include "ptdirac/couplings.hpp"
#include "ptdirac/errors.hpp"
#include "ptdirac/mapping.hpp"
#include "ptdirac/oracle.hpp"
#include "ptdirac/specfun.hpp"

namespace py = pybind11;
using namespace ptdirac;

namespace {

py::dict state_dict(const SpectrumState& s)
{
    py::dict d;
    d["n"] = s.n;
    d["energy"] = s.energy;
    d["branch"] = s.branch;
    d["valid"] = s.valid;
    d["residual"] = s.residual;
    d["provenance"] = to_string(s.provenance);
    d["note"] = s.note;
    return d;
}

py::list states(const Spectrum& sp)
{
    py::list out;
    for (const auto& s : sp.states)
        out.append(state_dict(s));
    return out;
}

py::array_t<cplx> as_array(const std::vector<cplx>& v) { return py::array_t<cplx>(v.size(), v.data()); }

} // namespace

PYBIND11_MODULE(_ptdirac, m)
{
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<GridSpec>(m, "Grid")
        .def_static("symmetric", &GridSpec::symmetric, py::arg("half_width"), py::arg("n"))
        .def_static("uniform", &GridSpec::uniform, py::arg("x_min"), py::arg("x_max"), py::arg("n"))
        .def_readonly("x_min", &GridSpec::x_min)
        .def_readonly("x_max", &GridSpec::x_max)
        .def_readonly("n", &GridSpec::n)
        .def("points", &GridSpec::points);

    py::class_<CouplingFamily>(m, "Family")
        .def_static(
            "quadratic", [](double a1, double b1, double a2) { return CouplingFamily::quadratic({a1, b1, a2}); },
            py::arg("a1"), py::arg("b1"), py::arg("a2"))
        .def_static(
            "oscillator",
            [](double omega1, double m1, double omega2, double m2, double v0) {
                return CouplingFamily::oscillator({omega1, m1, omega2, m2}, v0);
            },
            py::arg("omega1"), py::arg("m1"), py::arg("omega2"), py::arg("m2"), py::arg("v0") = 0.0)
        .def_static(
            "rosen_morse",
            [](double M0, double M1, double P0, double P1, double mu, double v0) {
                return CouplingFamily::rosen_morse({M0, M1, P0, P1, mu}, v0);
            },
            py::arg("M0"), py::arg("M1"), py::arg("P0"), py::arg("P1"), py::arg("mu") = 1.0, py::arg("v0") = 0.0)
        .def_property_readonly("tag", [](const CouplingFamily& f) { return to_string(f.tag()); })
        .def_property_readonly("v0", &CouplingFamily::v0);

    m.def("oscillator_level", &oscillator_level, py::arg("family"), py::arg("n"));
    m.def(
        "oscillator_norm",
        [](const CouplingFamily& f, int n) {
            const auto r = oscillator_norm(f, n);
            py::dict d;
            d["quadrature"] = r.quadrature;
            d["closed_form"] = r.closed_form ? py::cast(*r.closed_form) : py::none();
            d["rel_diff"] = r.rel_diff;
            return d;
        },
        py::arg("family"), py::arg("n"));
    m.def(
        "oscillator_spinor",
        [](const CouplingFamily& f, int n, int branch, const GridSpec& g) {
            const auto sp = oscillator_spinor(f, n, branch, g);
            return py::make_tuple(py::array_t<double>(sp.grid.n, sp.grid.points().data()), as_array(sp.psi_plus),
                                  as_array(sp.psi_minus), sp.energy);
        },
        py::arg("family"), py::arg("n"), py::arg("branch"), py::arg("grid"),
        "(y, psi_plus, psi_minus, energy) on the shifted real line");
    m.def("quadratic_b1zero_roots", &quadratic_b1zero_roots, py::arg("a2"), py::arg("n"));
    m.def(
        "rosen_morse_level",
        [](const CouplingFamily& f, int n) {
            const auto l = rosen_morse_level(f, n);
            py::dict d;
            d["a"] = l.a;
            d["b"] = l.b;
            d["eps"] = l.eps;
            d["radicand"] = l.radicand;
            return d;
        },
        py::arg("family"), py::arg("n") = 0);

    m.def(
        "spectrum",
        [](const CouplingFamily& f, int n_max) {
            switch (f.tag()) {
            case FamilyTag::Quadratic: return states(quadratic_spectrum(f, n_max));
            case FamilyTag::Oscillator: return states(oscillator_spectrum(f, n_max));
            case FamilyTag::RosenMorse: return states(rosen_morse_spectrum(f));
            default: throw ParameterError("spectrum: no closed form for a sampled family");
            }
        },
        py::arg("family"), py::arg("n_max") = 0);

    m.def(
        "dirac_spectrum",
        [](const CouplingFamily& f, const GridSpec& g, double lo, double hi) {
            DiracOptions o;
            o.window_lo = lo;
            o.window_hi = hi;
            return states(dirac_spectrum(f, g, o));
        },
        py::arg("family"), py::arg("grid"), py::arg("window_lo"), py::arg("window_hi"));

    m.def(
        "shoot",
        [](const CouplingFamily& f, const GridSpec& g, double lo, double hi) {
            const auto r = shoot_effective(EffectiveProblem::from_family(f), g, lo, hi);
            py::dict d;
            d["found"] = r.found;
            d["energy"] = r.energy;
            d["imag"] = r.imag;
            d["mismatch"] = r.mismatch;
            d["message"] = r.message;
            return d;
        },
        py::arg("family"), py::arg("grid"), py::arg("e_lo"), py::arg("e_hi"));

    m.def(
        "pt_violation", [](const CouplingFamily& f, const GridSpec& g) { return pt_check(f, g).max_violation(); },
        py::arg("family"), py::arg("grid"));

    m.def("bessel_k", &specfun::bessel_k, py::arg("order"), py::arg("z"));
    m.def("confluent_u", &specfun::confluent_u, py::arg("a"), py::arg("b"), py::arg("z"), py::arg("rel_tol") = 1e-13);
    m.def(
        "hermite", [](int n, double u) { return specfun::hermite(n, u).value; }, py::arg("n"), py::arg("u"));
    m.def(
        "jacobi", [](int n, double a, double b, double z) { return specfun::jacobi(n, a, b, z).value; },
        py::arg("n"), py::arg("a"), py::arg("b"), py::arg("z"));

    m.def(
        "run",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> full{"ptdirac"};
            full.insert(full.end(), args.begin(), args.end());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release nogil;
                code = cli::run(full, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
