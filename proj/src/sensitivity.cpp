#include "probin/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "probin/coefficients.hpp"

namespace probin {

namespace {

constexpr int kPathSamples = 32;

void require_p_at_least_two(double p) {
    if (!(p >= 2.0) || !std::isfinite(p)) {
        throw Error(ErrorCode::UnsupportedExponent, "linearization is only available for p >= 2");
    }
}

Point embed(const Eigen::VectorXd& grad) {
    if (grad.size() < 1 || grad.size() > 2) {
        throw Error(ErrorCode::InvalidParameter, "gradient must have 1 or 2 components");
    }
    return grad.size() == 1 ? Point(grad[0], 0.0) : Point(grad[0], grad[1]);
}

Eigen::MatrixXd shrink(const Eigen::Matrix2d& m, Eigen::Index dim) { return m.topLeftCorner(dim, dim); }

std::pair<double, double> eigen_range(const Eigen::Matrix2d& m, int dim) {
    if (dim == 1) return {m(0, 0), m(0, 0)};
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()[0], es.eigenvalues()[1]};
}

/// Σ_e vol σ ∇φ_i · C_e ∇v_e for every node i (fixed nodes included).
Vector coefficient_action(const PLaplacianForms& forms, const std::vector<Eigen::Matrix2d>& coeff, const Vector& v) {
    const auto& d = forms.domain();
    const auto grads = forms.gradients(v);
    Vector out = Vector::Zero(static_cast<Eigen::Index>(d.num_nodes()));
    for (size_t e = 0; e < d.num_elements(); ++e) {
        const Point flux = coeff[e] * grads[e];
        const double scale = forms.sigma(e) * d.element_volume(e);
        const auto nodes = d.element_nodes(e);
        const auto& g = d.shape_gradients(e);
        for (size_t a = 0; a < nodes.size(); ++a) out[nodes[a]] += scale * g[a].dot(flux);
    }
    return out;
}

/// ∫ |u|^{p-2} v φ_i for every node i.
Vector weighted_mass_action(const DiscreteDomain& d, double p, const Vector& u, const Vector& v) {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(d.num_nodes()));
    for (size_t e = 0; e < d.num_elements(); ++e) {
        const auto nodes = d.element_nodes(e);
        const auto w = d.quad_weights(e);
        for (size_t q = 0; q < w.size(); ++q) {
            const auto& shape = d.quad_shape()[q];
            double uq = 0.0;
            double vq = 0.0;
            for (size_t a = 0; a < nodes.size(); ++a) {
                uq += shape[a] * u[nodes[a]];
                vq += shape[a] * v[nodes[a]];
            }
            const double val = w[q] * std::pow(std::abs(uq), p - 2.0) * vq;
            for (size_t a = 0; a < nodes.size(); ++a) out[nodes[a]] += val * shape[a];
        }
    }
    return out;
}

}  // namespace

Eigen::MatrixXd linearized_matrix(const Eigen::VectorXd& grad, double p) {
    require_p_at_least_two(p);
    const Point g = embed(grad);
    const int dim = static_cast<int>(grad.size());
    Eigen::Matrix2d m = coeff::raw(g, p, 2);
    if (dim == 1) {
        // A scalar gradient has only the longitudinal direction.
        m(1, 1) = 0.0;
    }
    return shrink(m, dim);
}

Eigen::MatrixXd regularized_matrix(const Eigen::VectorXd& grad, double p, double delta,
                                   const CutoffFunction& cutoff_chi) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::InvalidParameter, "delta must be positive");
    if (!(p > 1.0)) throw Error(ErrorCode::InvalidParameter, "p must lie in (1, inf)");
    const Point g = embed(grad);
    const int dim = static_cast<int>(grad.size());
    double s = 0.0;
    if (cutoff_chi) {
        const double n = g.norm();
        const double chi = cutoff_chi(n, delta);
        s = chi == 0.0 ? n : std::sqrt(n * n + delta * delta * chi);
    } else {
        s = coeff::localized_magnitude(g, delta);
    }
    Eigen::Matrix2d m = coeff::matrix_with_magnitude(g, s, p, 2);
    if (dim == 1) m(1, 1) = 0.0;
    return shrink(m, dim);
}

std::pair<double, double> regularized_bounds(double p, double delta, double grad_max) {
    const double lo_s = delta;
    const double hi_s = grad_max + delta;
    const double lo_c = std::min(1.0, p - 1.0);
    const double hi_c = std::max(1.0, p - 1.0);
    if (p >= 2.0) return {lo_c * std::pow(lo_s, p - 2.0), hi_c * std::pow(hi_s, p - 2.0)};
    return {lo_c * std::pow(hi_s, p - 2.0), hi_c * std::pow(lo_s, p - 2.0)};
}

CoefficientField raw_coefficients(const DiscreteDomain& domain, double p, const Vector& u) {
    require_p_at_least_two(p);
    PLaplacianForms forms(domain, p, RobinField::zero(domain));
    const auto grads = forms.gradients(u);
    CoefficientField out{{}, domain.grad_dim(), CoefficientKind::RawA, 0.0};
    out.values.reserve(grads.size());
    for (const auto& g : grads) out.values.push_back(coeff::raw(g, p, out.dim));
    return out;
}

CoefficientField regularized_coefficients(const DiscreteDomain& domain, double p, const Vector& u, double delta) {
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidParameter, "delta must be positive");
    PLaplacianForms forms(domain, p, RobinField::zero(domain));
    const auto grads = forms.gradients(u);
    CoefficientField out{{}, domain.grad_dim(), CoefficientKind::RegularizedADelta, delta};
    out.values.reserve(grads.size());
    for (const auto& g : grads) out.values.push_back(coeff::localized(g, p, delta, out.dim));
    return out;
}

double default_sensitivity_delta(const DiscreteDomain& domain, double p, const Vector& u) {
    PLaplacianForms forms(domain, p, RobinField::zero(domain));
    double gmax = 0.0;
    for (const auto& g : forms.gradients(u)) gmax = std::max(gmax, g.norm());
    return 1e-3 * std::max(gmax, std::numeric_limits<double>::min());
}

PathEllipticityReport path_matrix_report(const DiscreteDomain& domain, const Eigenpair& u1, const Eigenpair& u2,
                                         double p) {
    require_p_at_least_two(p);
    if (static_cast<size_t>(u1.u.size()) != domain.num_nodes() ||
        static_cast<size_t>(u2.u.size()) != domain.num_nodes()) {
        throw Error(ErrorCode::InvalidParameter, "eigenpairs do not live on the given domain");
    }
    PLaplacianForms forms(domain, p, RobinField::zero(domain));
    const auto g1 = forms.gradients(u1.u);
    const auto g2 = forms.gradients(u2.u);
    const int dim = domain.grad_dim();

    PathEllipticityReport report;
    report.path = {{}, dim, CoefficientKind::PathABar, 0.0};
    report.theta_min = std::numeric_limits<double>::infinity();
    report.theta_max = 0.0;
    report.lower_bound_integral = std::numeric_limits<double>::infinity();
    for (size_t e = 0; e < g1.size(); ++e) {
        Eigen::Matrix2d bar = Eigen::Matrix2d::Zero();
        double integral = 0.0;
        for (int k = 0; k < kPathSamples; ++k) {
            const double t = (k + 0.5) / kPathSamples;
            const Point g = (1.0 - t) * g2[e] + t * g1[e];
            bar += coeff::raw(g, p, dim);
            integral += std::pow(g.norm(), p - 2.0);
        }
        bar /= kPathSamples;
        integral /= kPathSamples;
        const auto [lo, hi] = eigen_range(bar, dim);
        report.theta_min = std::min(report.theta_min, lo);
        report.theta_max = std::max(report.theta_max, hi);
        report.lower_bound_integral = std::min(report.lower_bound_integral, integral);
        report.path.values.push_back(bar);
    }
    return report;
}

double lambda_derivative(const Eigenpair& base, const RobinField& xi, const DiscreteDomain& domain) {
    xi.validate_direction(domain);
    const auto values = xi.face_quadrature_values(domain);
    const auto& robin = domain.partition().robin_faces;
    const int nq = domain.face_quad_points();
    double total = 0.0;
    for (size_t k = 0; k < robin.size(); ++k) {
        const auto& face = domain.boundary_faces()[robin[k]];
        const auto w = domain.face_quad_weights(robin[k]);
        for (int q = 0; q < nq; ++q) {
            double uq = 0.0;
            for (int a = 0; a < face.n_nodes; ++a) uq += domain.face_quad_shape()[q][a] * base.u[face.nodes[a]];
            total += w[q] * values[k * nq + q] * std::pow(std::abs(uq), base.p);
        }
    }
    return total;
}

LinearizedSolution solve_linearized(const DiscreteDomain& domain, double p, const RobinField& h, const Eigenpair& base,
                                    const RobinField& xi, double delta_reg) {
    require_p_at_least_two(p);
    xi.validate_direction(domain);
    if (static_cast<size_t>(base.u.size()) != domain.num_nodes()) {
        throw Error(ErrorCode::InvalidParameter, "eigenpair does not belong to this mesh");
    }
    const double delta = delta_reg > 0.0 ? delta_reg : default_sensitivity_delta(domain, p, base.u);
    PLaplacianForms forms(domain, p, h);
    const auto& dofs = forms.dofs();
    const int nf = dofs.num_free();

    const auto coeffs = regularized_coefficients(domain, p, base.u, delta);
    SparseMatrix jac = forms.stiffness(coeffs.values);
    if (!domain.partition().robin_faces.empty()) jac += (p - 1.0) * forms.robin_matrix(base.u, 0.0);
    jac -= base.lambda * (p - 1.0) * forms.mass_matrix(base.u, 0.0);

    const Vector m = dofs.restrict(forms.mass_action(base.u));
    const Vector b = dofs.restrict(forms.robin_action(base.u, xi));

    // [J  m; mᵀ 0] [u'; -λ'] = [-b; 0]
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(jac.nonZeros() + 2 * nf);
    for (int k = 0; k < jac.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(jac, k); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
    }
    for (int i = 0; i < nf; ++i) {
        trips.emplace_back(i, nf, m[i]);
        trips.emplace_back(nf, i, m[i]);
    }
    SparseMatrix aug(nf + 1, nf + 1);
    aug.setFromTriplets(trips.begin(), trips.end());
    Vector rhs = Vector::Zero(nf + 1);
    rhs.head(nf) = -b;

    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(aug);
    if (lu.info() != Eigen::Success) {
        throw Error(ErrorCode::LinearizationNotInvertible, "augmented linearized system is singular");
    }
    const Vector sol = lu.solve(rhs);
    const double res = (aug * sol - rhs).norm();
    if (!sol.allFinite() || res > 1e-6 * std::max(1.0, rhs.norm())) {
        throw Error(ErrorCode::LinearizationNotInvertible, "augmented linearized system is numerically singular");
    }

    LinearizedSolution out;
    out.u_prime = dofs.prolong(sol.head(nf));
    out.lambda_prime = -sol[nf];
    out.xi = xi;
    out.constraint_residual = std::abs(m.dot(sol.head(nf)));
    out.delta = delta;
    return out;
}

std::vector<double> linearized_boundary_flux(const DiscreteDomain& domain, double p, const Eigenpair& base,
                                             const LinearizedSolution& lin, BoundaryLabel label) {
    require_p_at_least_two(p);
    if (domain.faces_with_label(label).empty()) {
        throw Error(ErrorCode::InvalidParameter, "no boundary face carries label " + to_string(label));
    }
    PLaplacianForms forms(domain, p, RobinField::zero(domain));
    const auto coeffs = regularized_coefficients(domain, p, base.u, lin.delta);
    const Vector dr = coefficient_action(forms, coeffs.values, lin.u_prime) -
                      base.lambda * (p - 1.0) * weighted_mass_action(domain, p, base.u, lin.u_prime) -
                      lin.lambda_prime * forms.mass_action(base.u);
    const Vector meas = lumped_boundary_measure(domain, label);
    Vector q = Vector::Constant(static_cast<Eigen::Index>(domain.num_nodes()), std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < domain.num_nodes(); ++i) {
        if (meas[i] > 0.0 && !domain.is_interface(i)) q[i] = dr[i] / meas[i];
    }
    return nodal_to_face(domain, q, label);
}

}  // namespace probin
