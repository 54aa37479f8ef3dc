#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "probin/config.hpp"
#include "probin/domain.hpp"
#include "probin/eigensolver.hpp"
#include "probin/inverse.hpp"
#include "probin/limits.hpp"
#include "probin/mesh_io.hpp"
#include "probin/sensitivity.hpp"

namespace py = pybind11;
using namespace probin;

namespace {

GammaEnd gamma_end(const std::string& s) {
    if (s == "left") return GammaEnd::Left;
    if (s == "right") return GammaEnd::Right;
    if (s == "both") return GammaEnd::Both;
    if (s == "none") return GammaEnd::None;
    throw Error(ErrorCode::InvalidParameter, "gamma_end must be left, right, both or none");
}

RobinField field(const DiscreteDomain& d, const py::object& h) {
    if (py::isinstance<py::float_>(h) || py::isinstance<py::int_>(h)) return RobinField::constant(d, h.cast<double>());
    return RobinField{h.cast<std::vector<double>>(), RobinField::Representation::PiecewiseConstant};
}

EigenSolveSettings settings(double tol_lambda, double tol_u, int max_outer, std::uint64_t seed) {
    EigenSolveSettings s;
    s.tol_lambda = tol_lambda;
    s.tol_u = tol_u;
    s.max_outer = max_outer;
    s.seed = seed;
    return s;
}

}  // namespace

PYBIND11_MODULE(_probin, m) {
    m.doc() = "Principal eigenpairs of the p-Laplacian with mixed Dirichlet-Robin conditions";

    // Messages start with the error code, e.g. "InvalidMesh: ...".
    py::register_exception<Error>(m, "ProbinError", PyExc_RuntimeError);

    py::class_<DiscreteDomain>(m, "DiscreteDomain")
        .def_property_readonly("mode", [](const DiscreteDomain& d) { return to_string(d.mode()); })
        .def_property_readonly("space_dim", &DiscreteDomain::space_dim)
        .def_property_readonly("num_nodes", &DiscreteDomain::num_nodes)
        .def_property_readonly("num_elements", &DiscreteDomain::num_elements)
        .def_property_readonly("num_robin_faces", [](const DiscreteDomain& d) { return d.partition().robin_faces.size(); })
        .def("node_x", [](const DiscreteDomain& d) {
            Eigen::VectorXd x(static_cast<Eigen::Index>(d.num_nodes()));
            for (size_t i = 0; i < d.num_nodes(); ++i) x[static_cast<Eigen::Index>(i)] = d.nodes()[i].x();
            return x;
        })
        .def("to_text", [](const DiscreteDomain& d) {
            std::ostringstream out;
            write_mesh(out, d);
            return out.str();
        });

    m.def("interval_domain", [](int n, const std::string& g) { return build_interval_domain(n, gamma_end(g)); },
          py::arg("n_cells"), py::arg("gamma_end") = "right");
    m.def(
        "radial_domain",
        [](int n, double r_in, double r_out, int dim, const std::string& gamma) {
            RadialPartition part;
            part.inner = gamma == "inner" ? BoundaryLabel::Robin : BoundaryLabel::Dirichlet;
            part.outer = gamma == "outer" ? BoundaryLabel::Robin : BoundaryLabel::Dirichlet;
            return build_radial_domain(n, r_in, r_out, dim, part);
        },
        py::arg("n_cells"), py::arg("r_inner"), py::arg("r_outer"), py::arg("space_dim"), py::arg("gamma") = "outer");
    m.def(
        "annulus_domain",
        [](int n_radial, int n_angular, double r_in, double r_out, const std::string& gamma) {
            const PlanarMesh mesh = annulus_mesh(n_radial, n_angular, r_in, r_out, gamma);
            return build_planar_domain(mesh.vertices, mesh.triangles, mesh.faces);
        },
        py::arg("n_radial"), py::arg("n_angular"), py::arg("r_inner"), py::arg("r_outer"), py::arg("gamma") = "outer");
    m.def("mesh_from_text", [](const std::string& text) {
        std::istringstream in(text);
        return read_mesh(in);
    });

    py::class_<Eigenpair>(m, "Eigenpair")
        .def_readonly("lambda_", &Eigenpair::lambda)
        .def_readonly("u", &Eigenpair::u)
        .def_readonly("p", &Eigenpair::p)
        .def_readonly("residual_norm", &Eigenpair::residual_norm)
        .def_readonly("iterations", &Eigenpair::iterations);

    m.def(
        "principal_eigenpair",
        [](const DiscreteDomain& d, double p, const py::object& h, double tol_lambda, double tol_u, int max_outer,
           std::uint64_t seed) {
            return principal_eigenpair(d, p, field(d, h), settings(tol_lambda, tol_u, max_outer, seed));
        },
        py::arg("domain"), py::arg("p"), py::arg("h"), py::arg("tol_lambda") = 1e-10, py::arg("tol_u") = 1e-8,
        py::arg("max_outer") = 2000, py::arg("seed") = 1);
    m.def(
        "energy", [](const DiscreteDomain& d, double p, const py::object& h, const Vector& u) { return energy(d, p, field(d, h), u); },
        py::arg("domain"), py::arg("p"), py::arg("h"), py::arg("u"));
    m.def(
        "rayleigh_quotient",
        [](const DiscreteDomain& d, double p, const py::object& h, const Vector& u) { return rayleigh_quotient(d, p, field(d, h), u); },
        py::arg("domain"), py::arg("p"), py::arg("h"), py::arg("u"));
    m.def(
        "boundary_flux",
        [](const DiscreteDomain& d, const Eigenpair& pair, const std::string& label) {
            return boundary_flux(d, pair.p, pair, label == "robin" ? BoundaryLabel::Robin : BoundaryLabel::Dirichlet);
        },
        py::arg("domain"), py::arg("pair"), py::arg("label") = "dirichlet");
    m.def(
        "lambda_derivative",
        [](const DiscreteDomain& d, const Eigenpair& pair, const py::object& xi) { return lambda_derivative(pair, field(d, xi), d); },
        py::arg("domain"), py::arg("pair"), py::arg("xi"));
    m.def(
        "solve_linearized",
        [](const DiscreteDomain& d, const py::object& h, const Eigenpair& pair, const py::object& xi, double delta) {
            const auto lin = solve_linearized(d, pair.p, field(d, h), pair, field(d, xi), delta);
            return py::make_tuple(lin.lambda_prime, lin.u_prime);
        },
        py::arg("domain"), py::arg("h"), py::arg("pair"), py::arg("xi"), py::arg("delta") = 0.0);
    m.def("linearized_matrix", &linearized_matrix, py::arg("grad"), py::arg("p"));

    py::class_<Measurement>(m, "Measurement")
        .def_readonly("lambda_", &Measurement::lambda)
        .def_readonly("face_ids", &Measurement::face_ids)
        .def_readonly("flux_trace", &Measurement::flux_trace);
    m.def(
        "forward_measure",
        [](const DiscreteDomain& d, double p, const py::object& h, std::uint64_t seed) {
            return forward_measure(d, p, field(d, h), settings(1e-10, 1e-8, 2000, seed));
        },
        py::arg("domain"), py::arg("p"), py::arg("h"), py::arg("seed") = 1);
    m.def("measurement_distance", &measurement_distance);

    m.def("effective_h", [](double rho, double p) { return effective_h(ThicknessProfile{{rho}}, p).values.front(); },
          py::arg("rho"), py::arg("p"));
    m.def("p_limit_classify_inf",
          [](double rho, const std::vector<double>& grid) { return to_string(p_limit_classify_inf(rho, grid)); },
          py::arg("rho"), py::arg("p_grid"));
    m.def("bv_step_quotient", [](double a) { return bv_quotient_eval(BVProfile::step(a)); }, py::arg("a"));
    m.def("linf_rayleigh_eval", &linf_rayleigh_eval, py::arg("domain"), py::arg("u"));

    m.def("emit_default_config", [] { return emit_config(RunConfig{}); });
    m.def("roundtrip_config", [](const std::string& text) { return emit_config(parse_config_text(text)); });
}
