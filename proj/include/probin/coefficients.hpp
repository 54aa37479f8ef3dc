#pragma once

#include <Eigen/Core>

#include "probin/domain.hpp"

namespace probin {

/// Pointwise coefficient matrices of the linearized p-Laplacian, shared by the
/// inner Newton solves and the sensitivity module. Gradients are embedded in
/// R² (1D modes use the first component, and the returned matrix then has
/// zeros outside the (0,0) entry).
namespace coeff {

/// Smooth cutoff χ_δ: 1 on [0, δ], 0 on [2δ, ∞), monotone, |χ'| ≤ 2/δ.
double cutoff(double t, double delta);
double cutoff_derivative(double t, double delta);

/// |g|_{δ,loc} = sqrt(|g|² + δ² χ_δ(|g|)).
double localized_magnitude(const Point& g, double delta);

/// s^{p-2} I + (p-2) s^{p-4} g⊗g, restricted to the first `dim` components.
/// With s = |g| this is DF(g) for F(ξ) = |ξ|^{p-2}ξ.
Eigen::Matrix2d matrix_with_magnitude(const Point& g, double s, double p, int dim);

/// DF(g) with the conventions DF(0) = 0 for p > 2 and DF ≡ I for p = 2.
Eigen::Matrix2d raw(const Point& g, double p, int dim);

/// A_δ built from the localized magnitude.
Eigen::Matrix2d localized(const Point& g, double p, double delta, int dim);

/// A_δ with the cutoff always active, s = sqrt(|g|² + δ²); used for Newton
/// Hessians where |g|^{p-2} is singular or degenerate.
Eigen::Matrix2d always_regularized(const Point& g, double p, double delta, int dim);

/// sign(s)|s|^{q}
inline double signed_pow(double s, double q) {
    if (s == 0.0) return 0.0;
    return s > 0.0 ? std::pow(s, q) : -std::pow(-s, q);
}

}  // namespace coeff
}  // namespace probin
