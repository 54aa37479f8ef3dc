#include "probin/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/SparseCholesky>

#include "probin/coefficients.hpp"

namespace probin {

namespace {

void check_exponent(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidParameter, "p must lie in (1, inf)");
}

void check_admissible(const DiscreteDomain& domain, const Vector& u) {
    if (static_cast<size_t>(u.size()) != domain.num_nodes()) {
        throw Error(ErrorCode::InvalidParameter, "nodal vector size does not match the mesh");
    }
    const double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
    for (size_t i = 0; i < domain.num_nodes(); ++i) {
        if (domain.is_fixed(i) && std::abs(u[i]) > 1e-12 * scale) {
            throw Error(ErrorCode::ConstraintViolation, "u must vanish on the Dirichlet boundary");
        }
    }
}

/// Minimizes (1/p)E(v) − f·v over free dofs by damped Newton.
class InnerNewton {
public:
    InnerNewton(const PLaplacianForms& forms, const NewtonSettings& settings)
        : forms_(forms), settings_(settings) {}

    Vector minimize(const Vector& f_free, Vector x) {
        const auto& dofs = forms_.dofs();
        const double p = forms_.p();
        const int dim = forms_.domain().grad_dim();
        auto objective = [&](const Vector& xf) { return forms_.energy(dofs.prolong(xf)) / p - f_free.dot(xf); };

        double phi = objective(x);
        for (int it = 0; it < settings_.max_iters; ++it) {
            const Vector v = dofs.prolong(x);
            const Vector grad = dofs.restrict(forms_.gradient_action(v) + forms_.robin_action(v)) - f_free;

            const auto g = forms_.gradients(v);
            double gmax = 0.0;
            for (const auto& ge : g) gmax = std::max(gmax, ge.norm());
            const double delta = settings_.delta_scale * std::max(gmax, std::numeric_limits<double>::min());
            std::vector<Eigen::Matrix2d> coeff(g.size());
            for (size_t e = 0; e < g.size(); ++e) coeff[e] = coeff::always_regularized(g[e], p, delta, dim);
            SparseMatrix hess = forms_.stiffness(coeff);
            if (!forms_.domain().partition().robin_faces.empty()) {
                const double reg = settings_.delta_scale * std::max(v.cwiseAbs().maxCoeff(), 1e-300);
                hess += (p - 1.0) * forms_.robin_matrix(v, reg);
            }
            if (!analyzed_) {
                solver_.analyzePattern(hess);
                analyzed_ = true;
            }
            solver_.factorize(hess);
            if (solver_.info() != Eigen::Success) {
                throw Error(ErrorCode::NoConvergence, "inner Newton Hessian factorization failed");
            }
            const Vector step = -solver_.solve(grad);
            const double slope = grad.dot(step);

            double alpha = 1.0;
            Vector trial = x + step;
            double phi_trial = objective(trial);
            while (phi_trial > phi + settings_.armijo * alpha * slope) {
                // Differences at roundoff level: accept the full step.
                if (alpha == 1.0 && std::abs(phi_trial - phi) <= 1e-13 * std::abs(phi)) break;
                alpha *= settings_.backtrack;
                if (alpha < 1e-12) break;
                trial = x + alpha * step;
                phi_trial = objective(trial);
            }
            if (alpha < 1e-12) break;
            x = trial;
            phi = phi_trial;
            const double rel = (alpha * step).cwiseAbs().maxCoeff() / std::max(x.cwiseAbs().maxCoeff(), 1e-300);
            // p = 2 is a linear solve: one full Newton step is exact.
            if (rel <= settings_.step_tol || (p == 2.0 && alpha == 1.0)) break;
        }
        return x;
    }

private:
    const PLaplacianForms& forms_;
    NewtonSettings settings_;
    Eigen::SimplicialLDLT<SparseMatrix> solver_;
    bool analyzed_ = false;
};

double discrete_residual(const PLaplacianForms& forms, const Vector& u, double lambda) {
    const Vector r = forms.dofs().restrict(forms.gradient_action(u) + forms.robin_action(u) - lambda * forms.mass_action(u));
    return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

}  // namespace

void EigenSolveSettings::validate() const {
    if (!(tol_lambda > 0.0) || !(tol_u > 0.0)) throw Error(ErrorCode::InvalidParameter, "tolerances must be positive");
    if (max_outer < 1 || inner.max_iters < 1) throw Error(ErrorCode::InvalidParameter, "iteration limits must be positive");
    if (!(inner.delta_scale > 0.0)) throw Error(ErrorCode::InvalidParameter, "inner regularization must be positive");
    if (!(inner.backtrack > 0.0 && inner.backtrack < 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "backtracking factor must lie in (0, 1)");
    }
}

double energy(const DiscreteDomain& domain, double p, const RobinField& h, const Vector& u) {
    check_exponent(p);
    check_admissible(domain, u);
    return PLaplacianForms(domain, p, h).energy(u);
}

double rayleigh_quotient(const DiscreteDomain& domain, double p, const RobinField& h, const Vector& u) {
    check_exponent(p);
    check_admissible(domain, u);
    PLaplacianForms forms(domain, p, h);
    const double denom = forms.lp_power(u);
    if (!(denom > 0.0)) throw Error(ErrorCode::DegenerateInput, "Rayleigh quotient of the zero function");
    return forms.energy(u) / denom;
}

Eigenpair principal_eigenpair(const DiscreteDomain& domain, double p, const RobinField& h,
                              const EigenSolveSettings& settings) {
    return principal_eigenpair_weighted(domain, p, h, {}, settings);
}

Eigenpair principal_eigenpair_weighted(const DiscreteDomain& domain, double p, const RobinField& h,
                                       const std::vector<double>& sigma, const EigenSolveSettings& settings) {
    check_exponent(p);
    settings.validate();
    if (domain.fixed_faces().empty()) {
        throw Error(ErrorCode::UnsupportedProblem, "the Dirichlet part of the boundary is empty");
    }
    PLaplacianForms forms(domain, p, h, sigma);
    const auto& dofs = forms.dofs();
    if (dofs.num_free() == 0) throw Error(ErrorCode::InvalidMesh, "mesh has no free nodes");

    std::mt19937_64 rng(settings.seed);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    Vector x(dofs.num_free());
    for (int k = 0; k < dofs.num_free(); ++k) x[k] = dist(rng);

    auto normalize = [&](const Vector& xf) {
        Vector u = dofs.prolong(xf);
        return Vector(u / std::pow(forms.lp_power(u), 1.0 / p));
    };

    Vector u = normalize(x);
    double lambda = forms.energy(u);
    InnerNewton newton(forms, settings.inner);
    for (int k = 1; k <= settings.max_outer; ++k) {
        const Vector f = dofs.restrict(forms.mass_action(u));
        const Vector guess = dofs.restrict(u) * std::pow(lambda, -1.0 / (p - 1.0));
        const Vector v = newton.minimize(f, guess);
        const Vector u_next = normalize(v);
        const double lambda_next = forms.energy(u_next);
        const double dl = std::abs(lambda_next - lambda);
        const double du = (u_next - u).cwiseAbs().maxCoeff();
        u = u_next;
        lambda = lambda_next;
        if (!std::isfinite(lambda)) break;
        if (dl <= settings.tol_lambda * lambda && du <= settings.tol_u) {
            return Eigenpair{lambda, u, p, discrete_residual(forms, u, lambda), k};
        }
    }
    throw NoConvergenceError("inverse iteration did not converge within max_outer",
                             Eigenpair{lambda, u, p, discrete_residual(forms, u, lambda), settings.max_outer});
}

TwoPhaseResult two_phase_eigenpair(const CoatedDomain& coated, double p, const EigenSolveSettings& settings) {
    check_exponent(p);
    const auto& d = coated.domain;
    std::vector<double> sigma(d.num_elements(), 1.0);
    const double layer_sigma = std::pow(coated.epsilon, p - 1.0);
    for (size_t e = 0; e < d.num_elements(); ++e) {
        if (d.region(e) == Region::Coating) sigma[e] = layer_sigma;
    }
    const RobinField none = RobinField::zero(d);
    const Eigenpair pair = principal_eigenpair_weighted(d, p, none, sigma, settings);
    PLaplacianForms forms(d, p, none, sigma);
    TwoPhaseResult out;
    out.Lambda1 = pair.lambda;
    out.Phi = pair.u;
    out.coating_mass = forms.lp_power_on(pair.u, Region::Coating);
    out.substrate_restriction = pair.u.head(static_cast<Eigen::Index>(coated.base_node_count));
    out.residual_norm = pair.residual_norm;
    out.iterations = pair.iterations;
    return out;
}

Vector interior_residual(const PLaplacianForms& forms, const Vector& u, double lambda) {
    return forms.gradient_action(u) - lambda * forms.mass_action(u);
}

Vector lumped_boundary_measure(const DiscreteDomain& domain, BoundaryLabel label) {
    Vector m = Vector::Zero(static_cast<Eigen::Index>(domain.num_nodes()));
    const auto& shape = domain.face_quad_shape();
    for (int f : domain.faces_with_label(label)) {
        const auto& face = domain.boundary_faces()[f];
        const auto w = domain.face_quad_weights(f);
        for (size_t q = 0; q < w.size(); ++q) {
            for (int a = 0; a < face.n_nodes; ++a) m[face.nodes[a]] += w[q] * shape[q][a];
        }
    }
    return m;
}

std::vector<double> nodal_to_face(const DiscreteDomain& domain, const Vector& nodal, BoundaryLabel label) {
    std::vector<double> out;
    for (int f : domain.faces_with_label(label)) {
        const auto& face = domain.boundary_faces()[f];
        double sum = 0.0;
        int count = 0;
        for (int v : face.node_span()) {
            if (domain.is_interface(v)) continue;
            sum += nodal[v];
            ++count;
        }
        out.push_back(count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / count);
    }
    return out;
}

Vector nodal_boundary_flux(const DiscreteDomain& domain, double p, const Eigenpair& pair, BoundaryLabel label) {
    if (domain.faces_with_label(label).empty()) {
        throw Error(ErrorCode::InvalidParameter, "no boundary face carries label " + to_string(label));
    }
    if (static_cast<size_t>(pair.u.size()) != domain.num_nodes()) {
        throw Error(ErrorCode::InvalidParameter, "eigenpair does not belong to this mesh");
    }
    PLaplacianForms forms(domain, p, RobinField::zero(domain));
    const Vector r = interior_residual(forms, pair.u, pair.lambda);
    const Vector m = lumped_boundary_measure(domain, label);
    Vector q = Vector::Constant(static_cast<Eigen::Index>(domain.num_nodes()), std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < domain.num_nodes(); ++i) {
        if (m[i] > 0.0 && !domain.is_interface(i)) q[i] = r[i] / m[i];
    }
    return q;
}

std::vector<double> boundary_flux(const DiscreteDomain& domain, double p, const Eigenpair& pair,
                                  BoundaryLabel label) {
    const Vector q = nodal_boundary_flux(domain, p, pair, label);
    return nodal_to_face(domain, q, label);
}

}  // namespace probin
