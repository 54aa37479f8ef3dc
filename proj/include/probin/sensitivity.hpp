#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "probin/domain.hpp"
#include "probin/eigensolver.hpp"
#include "probin/robin_field.hpp"

namespace probin {

enum class CoefficientKind { RawA, RegularizedADelta, PathABar };

/// One symmetric matrix per element (P1 gradients are element-constant, so a
/// per-element value is the value at every quadrature point of the element).
/// In the 1D modes only the (0,0) entry is meaningful.
struct CoefficientField {
    std::vector<Eigen::Matrix2d> values;
    int dim = 1;
    CoefficientKind kind = CoefficientKind::RawA;
    double delta = 0.0;
};

struct LinearizedSolution {
    Vector u_prime;
    double lambda_prime = 0.0;
    RobinField xi;
    /// |∫ |u|^{p-2} u u' dx|
    double constraint_residual = 0.0;
    /// δ actually used for A_δ.
    double delta = 0.0;
};

struct PathEllipticityReport {
    double theta_min = 0.0;
    double theta_max = 0.0;
    /// min over elements of ∫_0^1 |(1-t)∇u₂ + t∇u₁|^{p-2} dt (32-point midpoint).
    double lower_bound_integral = 0.0;
    CoefficientField path;
};

using CutoffFunction = std::function<double(double t, double delta)>;

/// DF(ξ) = |ξ|^{p-2} I + (p-2)|ξ|^{p-4} ξ⊗ξ, with DF(0) = 0 for p > 2 and
/// DF ≡ I for p = 2. Throws UnsupportedExponent for p < 2.
Eigen::MatrixXd linearized_matrix(const Eigen::VectorXd& grad, double p);

/// A_δ from s = sqrt(|∇u|² + δ² χ(|∇u|)). The default χ is the smooth cutoff
/// of coeff::cutoff. Throws InvalidParameter for δ ≤ 0.
Eigen::MatrixXd regularized_matrix(const Eigen::VectorXd& grad, double p, double delta,
                                   const CutoffFunction& cutoff_chi = {});

/// Lower/upper ellipticity constants of A_δ for gradients bounded by `grad_max`:
/// [min(1,p-1) s^{p-2}, max(1,p-1) s^{p-2}] over s ∈ [δ, grad_max + δ].
std::pair<double, double> regularized_bounds(double p, double delta, double grad_max);

CoefficientField raw_coefficients(const DiscreteDomain& domain, double p, const Vector& u);
CoefficientField regularized_coefficients(const DiscreteDomain& domain, double p, const Vector& u, double delta);

/// 1e-3 · max_e |∇u|.
double default_sensitivity_delta(const DiscreteDomain& domain, double p, const Vector& u);

PathEllipticityReport path_matrix_report(const DiscreteDomain& domain, const Eigenpair& u1, const Eigenpair& u2,
                                         double p);

/// ∫_γ ξ |u|^p dσ with the boundary quadrature used by the energy.
double lambda_derivative(const Eigenpair& base, const RobinField& xi, const DiscreteDomain& domain);

/// Solves the augmented linearized eigenproblem for (u', λ') in direction ξ.
/// delta_reg ≤ 0 selects default_sensitivity_delta. p ≥ 2 only.
LinearizedSolution solve_linearized(const DiscreteDomain& domain, double p, const RobinField& h, const Eigenpair& base,
                                    const RobinField& xi, double delta_reg = 0.0);

/// Derivative of the consistent flux on `label` along a linearized solution,
/// per face (same layout as boundary_flux).
std::vector<double> linearized_boundary_flux(const DiscreteDomain& domain, double p, const Eigenpair& base,
                                             const LinearizedSolution& lin, BoundaryLabel label);

}  // namespace probin
