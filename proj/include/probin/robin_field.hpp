#pragma once

#include <vector>

#include "probin/domain.hpp"

namespace probin {

/// Nonnegative Robin coefficient h on γ.
///
/// PiecewiseConstant stores one value per γ-face (in `partition().robin_faces`
/// order); Nodal stores one value per mesh node, only γ-nodes are read.
struct RobinField {
    enum class Representation { PiecewiseConstant, Nodal };

    std::vector<double> values;
    Representation representation = Representation::PiecewiseConstant;

    static RobinField constant(const DiscreteDomain& domain, double value);
    static RobinField zero(const DiscreteDomain& domain) { return constant(domain, 0.0); }

    /// Throws InvalidParameter on size mismatch, negative or non-finite values.
    void validate(const DiscreteDomain& domain) const;
    /// Same as validate() but allows negative values (perturbation directions ξ).
    void validate_direction(const DiscreteDomain& domain) const;

    /// h at every face quadrature point of every γ-face, γ-face-major.
    std::vector<double> face_quadrature_values(const DiscreteDomain& domain) const;

    RobinField& operator+=(const RobinField& other);
    RobinField& operator*=(double s);
    friend RobinField operator+(RobinField a, const RobinField& b) { return a += b; }
    friend RobinField operator*(double s, RobinField a) { return a *= s; }
};

}  // namespace probin
