#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "probin/domain.hpp"
#include "probin/eigensolver.hpp"
#include "probin/robin_field.hpp"

namespace probin {

/// Data of the inverse problem: λ₁ and the consistent flux on the Γ_D faces
/// that have at least one non-interface node.
///
/// The flux norm is the face-measure weighted ℓ^{p'} norm, so a measurement
/// carries the exponent and the weights it is compared with.
struct Measurement {
    double lambda = 0.0;
    std::vector<int> face_ids;
    std::vector<double> flux_trace;
    std::vector<double> face_measure;
    double p = 2.0;

    /// [λ, q_1, ..., q_m]
    Vector as_vector() const;
    /// [1, w_1, ..., w_m], the weights of the Gauss–Newton misfit.
    Vector weights() const;
};

Measurement forward_measure(const DiscreteDomain& domain, double p, const RobinField& h,
                            const EigenSolveSettings& settings = {});
/// Measurement of an already solved eigenpair.
Measurement measure_eigenpair(const DiscreteDomain& domain, const Eigenpair& pair);

/// |λ₁ − λ₂| + (Σ_f w_f |q₁ − q₂|^{p'})^{1/p'}. Throws InvalidParameter when the
/// two measurements live on different face sets or exponents.
double measurement_distance(const Measurement& m1, const Measurement& m2);

/// Finite-dimensional family h = Σ_j c_j φ_j on γ.
///
/// γ-faces are ordered along chains of the Robin boundary and assigned the
/// normalized arclength s ∈ [0, 1] of their midpoints; basis functions are
/// functions of s evaluated per face.
class RobinParameterization {
public:
    enum class Basis { PiecewiseConstant, BSpline };

    static RobinParameterization piecewise_constant(const DiscreteDomain& domain, int k, double h_min = 1e-3);
    static RobinParameterization bspline(const DiscreteDomain& domain, int k, int degree, double h_min = 1e-3);

    Basis basis() const { return basis_; }
    int size() const { return static_cast<int>(phi_.cols()); }
    int degree() const { return degree_; }
    double h_min() const { return h_min_; }
    /// Arclength coordinate of each γ-face (robin_faces order).
    const std::vector<double>& face_parameter() const { return s_; }
    /// Face-by-basis matrix of φ_j values.
    const Eigen::MatrixXd& face_values() const { return phi_; }

    RobinField synthesize(const Vector& c) const;
    RobinField basis_function(int j) const;
    /// Clamps every coefficient to h_min. The bases are nonnegative partitions
    /// of unity, so the synthesized field is then ≥ h_min on every face.
    Vector project(const Vector& c) const;
    bool admissible(const Vector& c) const;
    /// Least-squares coefficients of a face field in the measure-weighted ℓ².
    Vector fit(const RobinField& h) const;

private:
    RobinParameterization(const DiscreteDomain& domain, Basis basis, int k, int degree, double h_min);

    const DiscreteDomain* domain_;
    Basis basis_;
    int degree_ = 0;
    double h_min_;
    std::vector<double> s_;
    std::vector<double> measure_;
    Eigen::MatrixXd phi_;
};

/// ‖h₁ − h₂‖_{L²(γ)} for piecewise-constant face fields.
double robin_l2_distance(const DiscreteDomain& domain, const RobinField& h1, const RobinField& h2);

struct JacobianResult {
    Eigen::MatrixXd matrix;  // rows follow Measurement::as_vector, columns the basis
    Measurement base;
    Eigenpair pair;
};

/// Columns are (λ'(h₀)[φ_j], linearized Γ_D flux) from solve_linearized.
/// delta ≤ 0 selects the default sensitivity regularization.
JacobianResult jacobian(const DiscreteDomain& domain, double p, const RobinField& h0,
                        const RobinParameterization& param, const EigenSolveSettings& settings = {},
                        double delta = 0.0, int threads = 1);
/// Jacobian in arbitrary directions around a solved eigenpair.
Eigen::MatrixXd jacobian_at(const DiscreteDomain& domain, double p, const RobinField& h0, const Eigenpair& pair,
                            const Measurement& base, const std::vector<RobinField>& directions, double delta = 0.0,
                            int threads = 1);

/// Relative Gaussian noise: flux entry q becomes q + flux_level·|q|·N(0,1) and
/// λ becomes λ + lambda_level·|λ|·N(0,1).
struct NoiseModel {
    double flux_level = 0.0;
    double lambda_level = 0.0;

    Measurement apply(const Measurement& clean, std::uint64_t seed) const;
    /// Expected weighted ℓ² size of the perturbation for `clean`.
    double expected_misfit(const Measurement& clean) const;
};

struct GaussNewtonSettings {
    int max_iters = 30;
    double armijo = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 30;
    /// Stop when ‖Δc‖ ≤ step_tol · max(1, ‖c‖).
    double step_tol = 1e-10;
    /// Stop when a step reduces the misfit by less than this relative amount.
    double stagnation_tol = 1e-8;
    /// Stop when the misfit is below this fraction of ‖data‖_W.
    double misfit_tol = 1e-13;
    double delta = 0.0;
    int threads = 1;
    EigenSolveSettings solver;
};

struct ReconstructionResult {
    Vector c_hat;
    RobinField h_hat;
    /// Weighted ℓ² misfit at the start and after every accepted step.
    std::vector<double> residual_history;
    std::vector<double> step_norms;
    /// Coefficients at the start and after every accepted step.
    std::vector<Vector> coefficient_history;
    double regularization_weight = 0.0;
    bool converged = false;
    int iterations = 0;
};

class NoDescentDirectionError : public Error {
public:
    NoDescentDirectionError(const std::string& what, ReconstructionResult best)
        : Error(ErrorCode::NoDescentDirection, what), best_(std::move(best)) {}
    const ReconstructionResult& best() const { return best_; }

private:
    ReconstructionResult best_;
};

/// Weighted ℓ² misfit ‖F − data‖_W.
double weighted_misfit(const Measurement& model, const Measurement& data);

/// Projected Gauss–Newton with Levenberg-type Tikhonov damping:
/// (JᵀWJ + reg·I) Δc = JᵀW(data − F(c)), c ← P(c + αΔc), Armijo on the misfit.
ReconstructionResult gauss_newton_reconstruct(const DiscreteDomain& domain, double p, const Measurement& data,
                                              const RobinParameterization& param, const Vector& c_init,
                                              double reg_weight, const GaussNewtonSettings& settings = {});

/// Runs gauss_newton_reconstruct for each weight (sorted descending) and keeps
/// the largest one whose final misfit is ≤ 1.1 × noise_level; falls back to
/// the smallest weight.
ReconstructionResult discrepancy_reconstruct(const DiscreteDomain& domain, double p, const Measurement& data,
                                             const RobinParameterization& param, const Vector& c_init,
                                             std::vector<double> reg_weights, double noise_level,
                                             const GaussNewtonSettings& settings = {});

struct StabilityPair {
    double radius = 0.0;
    double data_distance = 0.0;
    double error = 0.0;
    bool held_out = false;
};

struct StabilityProbeResult {
    std::vector<StabilityPair> pairs;
    double alpha_hat = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    /// Smallest C₀ with e ≤ C₀ M^{1−α̂} δ^{α̂} on every fitted pair.
    double C0 = 0.0;
    double M_used = 0.0;
    bool holdout_ok = false;
};

struct StabilityProbeSettings {
    /// Every holdout_every-th radius (excluding the first and last) is held out.
    int holdout_every = 3;
    std::uint64_t seed = 1;
    int threads = 1;
    EigenSolveSettings solver;
};

/// Perturbs h₀ in random directions of the parameterization, one per radius
/// (L²(γ) size = radius), and fits log e = α̂ log δ + b on the kept pairs.
/// Perturbations leaving the C¹ ball of radius M or the admissible set are
/// skipped. Throws InsufficientData with fewer than 5 fitted pairs.
StabilityProbeResult stability_probe(const DiscreteDomain& domain, double p, const RobinField& h0,
                                     const RobinParameterization& param, const std::vector<double>& radii, double M,
                                     const StabilityProbeSettings& settings = {});

/// C¹ norm of a face field: max |h| plus the largest difference quotient
/// between adjacent faces along the arclength.
double robin_c1_norm(const RobinParameterization& param, const RobinField& h);

/// Minimum pairwise measurement_distance among F(h_i). Requires ≥ 2 fields.
double uniqueness_probe(const DiscreteDomain& domain, double p, const std::vector<RobinField>& fields,
                        const EigenSolveSettings& settings = {}, int threads = 1);

/// CSV with header `lambda,<face_id>,...` and one data row.
void write_measurement_csv(std::ostream& out, const Measurement& m);
/// Reads a measurement for `domain`; face measures come from the mesh.
Measurement read_measurement_csv(std::istream& in, const DiscreteDomain& domain, double p);

/// iteration,misfit,step_norm,reg_weight
void write_reconstruction_report(std::ostream& out, const ReconstructionResult& result);

}  // namespace probin
