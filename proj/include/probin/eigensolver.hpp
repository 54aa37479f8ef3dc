#pragma once

#include <cstdint>
#include <vector>

#include "probin/domain.hpp"
#include "probin/errors.hpp"
#include "probin/forms.hpp"
#include "probin/robin_field.hpp"

namespace probin {

struct NewtonSettings {
    int max_iters = 60;
    /// δ_inner = delta_scale · max_e |∇v|; Hessian-only regularization.
    double delta_scale = 1e-8;
    double backtrack = 0.5;
    double armijo = 1e-4;
    /// Relative step size below which the inner solve is considered converged.
    double step_tol = 1e-14;
};

struct EigenSolveSettings {
    double tol_lambda = 1e-10;
    double tol_u = 1e-8;
    int max_outer = 2000;
    NewtonSettings inner;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Normalized positive principal eigenpair: ‖u‖_{L^p} = 1, u > 0 off Γ_D.
struct Eigenpair {
    double lambda = 0.0;
    Vector u;
    double p = 2.0;
    /// ‖K(u) + B_h(u) - λ M(u)‖_∞ over free dofs (discrete weak residual).
    double residual_norm = 0.0;
    int iterations = 0;
};

/// Raised when the outer iteration exhausts `max_outer`; carries the last iterate.
class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& what, Eigenpair best)
        : Error(ErrorCode::NoConvergence, what), best_(std::move(best)) {}
    const Eigenpair& best() const { return best_; }

private:
    Eigenpair best_;
};

struct TwoPhaseResult {
    double Lambda1 = 0.0;
    Vector Phi;
    double coating_mass = 0.0;
    Vector substrate_restriction;
    double residual_norm = 0.0;
    int iterations = 0;
};

/// ∫_Ω |∇u|^p + ∫_γ h |u|^p. Throws ConstraintViolation if u ≠ 0 on Γ_D.
double energy(const DiscreteDomain& domain, double p, const RobinField& h, const Vector& u);

/// energy(u) / ∫|u|^p. Throws DegenerateInput when ‖u‖_p = 0.
double rayleigh_quotient(const DiscreteDomain& domain, double p, const RobinField& h, const Vector& u);

/// Inverse-power iteration with damped Newton inner solves (see README).
Eigenpair principal_eigenpair(const DiscreteDomain& domain, double p, const RobinField& h,
                              const EigenSolveSettings& settings = {});

/// Same iteration with conductivity σ per element (h on the domain's γ).
Eigenpair principal_eigenpair_weighted(const DiscreteDomain& domain, double p, const RobinField& h,
                                       const std::vector<double>& sigma, const EigenSolveSettings& settings);

/// Principal eigenpair of the coated problem, σ = 1 in Ω and ε^{p-1} in Σ_ε,
/// homogeneous Dirichlet on Γ_D and on the outer skin.
TwoPhaseResult two_phase_eigenpair(const CoatedDomain& coated, double p, const EigenSolveSettings& settings = {});

/// Consistent nodal flux |∇u|^{p-2}∂_ν u on the faces labeled `label`: the
/// interior residual paired with each boundary basis function, divided by its
/// lumped boundary measure. Interface (ζ) nodes get NaN.
Vector nodal_boundary_flux(const DiscreteDomain& domain, double p, const Eigenpair& pair, BoundaryLabel label);

/// Per-face flux on `label` (faces_with_label order): the mean of the nodal
/// fluxes of the face's non-interface nodes (NaN if it has none). Throws InvalidParameter if no
/// face carries the label.
std::vector<double> boundary_flux(const DiscreteDomain& domain, double p, const Eigenpair& pair,
                                  BoundaryLabel label);

/// Interior residual r_i = ∫|∇u|^{p-2}∇u·∇φ_i − λ∫|u|^{p-2}uφ_i, nodal.
Vector interior_residual(const PLaplacianForms& forms, const Vector& u, double lambda);

/// Lumped boundary measure ∫ φ_i dσ over the faces with `label`.
Vector lumped_boundary_measure(const DiscreteDomain& domain, BoundaryLabel label);

/// Face values from nodal values (mean over non-interface nodes, NaN if none).
std::vector<double> nodal_to_face(const DiscreteDomain& domain, const Vector& nodal, BoundaryLabel label);

}  // namespace probin
