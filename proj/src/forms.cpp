#include "probin/forms.hpp"

#include <cmath>

#include "probin/coefficients.hpp"
#include "probin/errors.hpp"

namespace probin {

namespace {

using Triplet = Eigen::Triplet<double>;

double element_value(const DiscreteDomain& d, size_t e, int q, const Vector& u) {
    const auto nodes = d.element_nodes(e);
    const auto& shape = d.quad_shape()[q];
    double v = 0.0;
    for (size_t a = 0; a < nodes.size(); ++a) v += shape[a] * u[nodes[a]];
    return v;
}

double face_value(const DiscreteDomain& d, const BoundaryFace& face, int q, const Vector& u) {
    const auto& shape = d.face_quad_shape()[q];
    double v = 0.0;
    for (int a = 0; a < face.n_nodes; ++a) v += shape[a] * u[face.nodes[a]];
    return v;
}

double regularized_power(double u, double reg, double exponent) {
    if (reg == 0.0) return std::pow(std::abs(u), exponent);
    return std::pow(u * u + reg * reg, 0.5 * exponent);
}

}  // namespace

DofMap::DofMap(const DiscreteDomain& domain) : dof_of_node_(domain.num_nodes(), -1) {
    for (size_t i = 0; i < domain.num_nodes(); ++i) {
        if (!domain.is_fixed(i)) {
            dof_of_node_[i] = static_cast<int>(free_nodes_.size());
            free_nodes_.push_back(static_cast<int>(i));
        }
    }
}

Vector DofMap::restrict(const Vector& nodal) const {
    Vector out(num_free());
    for (int k = 0; k < num_free(); ++k) out[k] = nodal[free_nodes_[k]];
    return out;
}

Vector DofMap::prolong(const Vector& free) const {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(dof_of_node_.size()));
    for (int k = 0; k < num_free(); ++k) out[free_nodes_[k]] = free[k];
    return out;
}

PLaplacianForms::PLaplacianForms(const DiscreteDomain& domain, double p, const RobinField& h,
                                 std::vector<double> sigma)
    : domain_(&domain), p_(p), sigma_(std::move(sigma)), dofs_(domain) {
    h.validate(domain);
    h_quad_ = h.face_quadrature_values(domain);
    if (sigma_.empty()) sigma_.assign(domain.num_elements(), 1.0);
    if (sigma_.size() != domain.num_elements()) {
        throw Error(ErrorCode::InvalidParameter, "conductivity needs one value per element");
    }
}

std::vector<Point> PLaplacianForms::gradients(const Vector& u) const {
    const auto& d = *domain_;
    std::vector<Point> out(d.num_elements(), Point::Zero());
    for (size_t e = 0; e < d.num_elements(); ++e) {
        const auto nodes = d.element_nodes(e);
        const auto& g = d.shape_gradients(e);
        for (size_t a = 0; a < nodes.size(); ++a) out[e] += u[nodes[a]] * g[a];
    }
    return out;
}

double PLaplacianForms::gradient_energy(const Vector& u) const {
    const auto grads = gradients(u);
    double total = 0.0;
    for (size_t e = 0; e < grads.size(); ++e) {
        total += sigma_[e] * std::pow(grads[e].norm(), p_) * domain_->element_volume(e);
    }
    return total;
}

double PLaplacianForms::robin_energy(const Vector& u) const {
    const auto& d = *domain_;
    const auto& robin = d.partition().robin_faces;
    const int nq = d.face_quad_points();
    double total = 0.0;
    for (size_t k = 0; k < robin.size(); ++k) {
        const auto& face = d.boundary_faces()[robin[k]];
        const auto w = d.face_quad_weights(robin[k]);
        for (int q = 0; q < nq; ++q) {
            total += w[q] * h_quad_[k * nq + q] * std::pow(std::abs(face_value(d, face, q, u)), p_);
        }
    }
    return total;
}

double PLaplacianForms::lp_power(const Vector& u) const {
    const auto& d = *domain_;
    double total = 0.0;
    for (size_t e = 0; e < d.num_elements(); ++e) {
        const auto w = d.quad_weights(e);
        for (size_t q = 0; q < w.size(); ++q) {
            total += w[q] * std::pow(std::abs(element_value(d, e, static_cast<int>(q), u)), p_);
        }
    }
    return total;
}

double PLaplacianForms::lp_power_on(const Vector& u, Region region) const {
    const auto& d = *domain_;
    double total = 0.0;
    for (size_t e = 0; e < d.num_elements(); ++e) {
        if (d.region(e) != region) continue;
        const auto w = d.quad_weights(e);
        for (size_t q = 0; q < w.size(); ++q) {
            total += w[q] * std::pow(std::abs(element_value(d, e, static_cast<int>(q), u)), p_);
        }
    }
    return total;
}

Vector PLaplacianForms::gradient_action(const Vector& u) const {
    const auto& d = *domain_;
    const auto grads = gradients(u);
    Vector out = Vector::Zero(static_cast<Eigen::Index>(d.num_nodes()));
    for (size_t e = 0; e < d.num_elements(); ++e) {
        const double n = grads[e].norm();
        const double scale = n == 0.0 ? 0.0 : sigma_[e] * std::pow(n, p_ - 2.0) * d.element_volume(e);
        const auto nodes = d.element_nodes(e);
        const auto& g = d.shape_gradients(e);
        for (size_t a = 0; a < nodes.size(); ++a) out[nodes[a]] += scale * grads[e].dot(g[a]);
    }
    return out;
}

Vector PLaplacianForms::robin_action(const Vector& u) const {
    const auto& d = *domain_;
    const auto& robin = d.partition().robin_faces;
    const int nq = d.face_quad_points();
    Vector out = Vector::Zero(static_cast<Eigen::Index>(d.num_nodes()));
    for (size_t k = 0; k < robin.size(); ++k) {
        const auto& face = d.boundary_faces()[robin[k]];
        const auto w = d.face_quad_weights(robin[k]);
        for (int q = 0; q < nq; ++q) {
            const double val = w[q] * h_quad_[k * nq + q] * coeff::signed_pow(face_value(d, face, q, u), p_ - 1.0);
            for (int a = 0; a < face.n_nodes; ++a) out[face.nodes[a]] += val * d.face_quad_shape()[q][a];
        }
    }
    return out;
}

Vector PLaplacianForms::robin_action(const Vector& u, const RobinField& xi) const {
    const auto& d = *domain_;
    xi.validate_direction(d);
    const auto xi_quad = xi.face_quadrature_values(d);
    const auto& robin = d.partition().robin_faces;
    const int nq = d.face_quad_points();
    Vector out = Vector::Zero(static_cast<Eigen::Index>(d.num_nodes()));
    for (size_t k = 0; k < robin.size(); ++k) {
        const auto& face = d.boundary_faces()[robin[k]];
        const auto w = d.face_quad_weights(robin[k]);
        for (int q = 0; q < nq; ++q) {
            const double val = w[q] * xi_quad[k * nq + q] * coeff::signed_pow(face_value(d, face, q, u), p_ - 1.0);
            for (int a = 0; a < face.n_nodes; ++a) out[face.nodes[a]] += val * d.face_quad_shape()[q][a];
        }
    }
    return out;
}

Vector PLaplacianForms::mass_action(const Vector& u) const {
    const auto& d = *domain_;
    Vector out = Vector::Zero(static_cast<Eigen::Index>(d.num_nodes()));
    for (size_t e = 0; e < d.num_elements(); ++e) {
        const auto nodes = d.element_nodes(e);
        const auto w = d.quad_weights(e);
        for (size_t q = 0; q < w.size(); ++q) {
            const double val = w[q] * coeff::signed_pow(element_value(d, e, static_cast<int>(q), u), p_ - 1.0);
            for (size_t a = 0; a < nodes.size(); ++a) out[nodes[a]] += val * d.quad_shape()[q][a];
        }
    }
    return out;
}

SparseMatrix PLaplacianForms::stiffness(const std::vector<Eigen::Matrix2d>& coeff) const {
    const auto& d = *domain_;
    std::vector<Triplet> trips;
    trips.reserve(d.num_elements() * 9);
    for (size_t e = 0; e < d.num_elements(); ++e) {
        const auto nodes = d.element_nodes(e);
        const auto& g = d.shape_gradients(e);
        const double scale = sigma_[e] * d.element_volume(e);
        for (size_t a = 0; a < nodes.size(); ++a) {
            const int ia = dofs_.dof(nodes[a]);
            if (ia < 0) continue;
            for (size_t b = 0; b < nodes.size(); ++b) {
                const int ib = dofs_.dof(nodes[b]);
                if (ib < 0) continue;
                trips.emplace_back(ia, ib, scale * g[a].dot(coeff[e] * g[b]));
            }
        }
    }
    SparseMatrix m(dofs_.num_free(), dofs_.num_free());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

SparseMatrix PLaplacianForms::robin_matrix(const Vector& u, double reg) const {
    const auto& d = *domain_;
    const auto& robin = d.partition().robin_faces;
    const int nq = d.face_quad_points();
    std::vector<Triplet> trips;
    for (size_t k = 0; k < robin.size(); ++k) {
        const auto& face = d.boundary_faces()[robin[k]];
        const auto w = d.face_quad_weights(robin[k]);
        for (int q = 0; q < nq; ++q) {
            const double val =
                w[q] * h_quad_[k * nq + q] * regularized_power(face_value(d, face, q, u), reg, p_ - 2.0);
            const auto& shape = d.face_quad_shape()[q];
            for (int a = 0; a < face.n_nodes; ++a) {
                const int ia = dofs_.dof(face.nodes[a]);
                if (ia < 0) continue;
                for (int b = 0; b < face.n_nodes; ++b) {
                    const int ib = dofs_.dof(face.nodes[b]);
                    if (ib >= 0) trips.emplace_back(ia, ib, val * shape[a] * shape[b]);
                }
            }
        }
    }
    SparseMatrix m(dofs_.num_free(), dofs_.num_free());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

SparseMatrix PLaplacianForms::mass_matrix(const Vector& u, double reg) const {
    const auto& d = *domain_;
    std::vector<Triplet> trips;
    for (size_t e = 0; e < d.num_elements(); ++e) {
        const auto nodes = d.element_nodes(e);
        const auto w = d.quad_weights(e);
        for (size_t q = 0; q < w.size(); ++q) {
            const double val =
                w[q] * regularized_power(element_value(d, e, static_cast<int>(q), u), reg, p_ - 2.0);
            const auto& shape = d.quad_shape()[q];
            for (size_t a = 0; a < nodes.size(); ++a) {
                const int ia = dofs_.dof(nodes[a]);
                if (ia < 0) continue;
                for (size_t b = 0; b < nodes.size(); ++b) {
                    const int ib = dofs_.dof(nodes[b]);
                    if (ib >= 0) trips.emplace_back(ia, ib, val * shape[a] * shape[b]);
                }
            }
        }
    }
    SparseMatrix m(dofs_.num_free(), dofs_.num_free());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

}  // namespace probin
