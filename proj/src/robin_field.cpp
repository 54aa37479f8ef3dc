#include "probin/robin_field.hpp"

#include <cmath>

#include "probin/errors.hpp"

namespace probin {

RobinField RobinField::constant(const DiscreteDomain& domain, double value) {
    RobinField h;
    h.values.assign(domain.partition().robin_faces.size(), value);
    return h;
}

void RobinField::validate_direction(const DiscreteDomain& domain) const {
    const size_t expected = representation == Representation::PiecewiseConstant
                                ? domain.partition().robin_faces.size()
                                : domain.num_nodes();
    if (values.size() != expected) {
        throw Error(ErrorCode::InvalidParameter, "Robin field has " + std::to_string(values.size()) +
                                                     " values, expected " + std::to_string(expected));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParameter, "Robin field must be finite");
    }
}

void RobinField::validate(const DiscreteDomain& domain) const {
    validate_direction(domain);
    for (double v : values) {
        if (v < 0.0) throw Error(ErrorCode::InvalidParameter, "h must be nonnegative");
    }
}

std::vector<double> RobinField::face_quadrature_values(const DiscreteDomain& domain) const {
    const auto& robin = domain.partition().robin_faces;
    const int nq = domain.face_quad_points();
    const auto& shape = domain.face_quad_shape();
    std::vector<double> out(robin.size() * nq, 0.0);
    for (size_t k = 0; k < robin.size(); ++k) {
        const auto& face = domain.boundary_faces()[robin[k]];
        for (int q = 0; q < nq; ++q) {
            double v = 0.0;
            if (representation == Representation::PiecewiseConstant) {
                v = values[k];
            } else {
                for (int a = 0; a < face.n_nodes; ++a) v += shape[q][a] * values[face.nodes[a]];
            }
            out[k * nq + q] = v;
        }
    }
    return out;
}

RobinField& RobinField::operator+=(const RobinField& other) {
    if (other.representation != representation || other.values.size() != values.size()) {
        throw Error(ErrorCode::InvalidParameter, "Robin fields have different layouts");
    }
    for (size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
    return *this;
}

RobinField& RobinField::operator*=(double s) {
    for (double& v : values) v *= s;
    return *this;
}

}  // namespace probin
