#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "probin/domain.hpp"
#include "probin/robin_field.hpp"

namespace probin {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Numbering of the unconstrained nodes (all nodes off Γ_D and the outer skin).
class DofMap {
public:
    explicit DofMap(const DiscreteDomain& domain);

    int num_free() const { return static_cast<int>(free_nodes_.size()); }
    int dof(size_t node) const { return dof_of_node_[node]; }
    int node(int dof) const { return free_nodes_[dof]; }

    Vector restrict(const Vector& nodal) const;
    Vector prolong(const Vector& free) const;

private:
    std::vector<int> dof_of_node_;
    std::vector<int> free_nodes_;
};

/// Discrete forms of the p-Laplacian Robin problem on a P1 mesh:
///
///   E(u) = Σ_e σ_e |∇u|^p |e| + ∫_γ h |u|^p dσ,    N(u) = ∫ |u|^p dx,
///
/// their first variations (as nodal vectors) and the matrices that appear in
/// Newton steps and linearizations (restricted to free dofs). σ defaults to 1.
class PLaplacianForms {
public:
    PLaplacianForms(const DiscreteDomain& domain, double p, const RobinField& h, std::vector<double> sigma = {});

    const DiscreteDomain& domain() const { return *domain_; }
    double p() const { return p_; }
    const DofMap& dofs() const { return dofs_; }
    double sigma(size_t e) const { return sigma_[e]; }

    std::vector<Point> gradients(const Vector& u) const;

    double gradient_energy(const Vector& u) const;
    double robin_energy(const Vector& u) const;
    double energy(const Vector& u) const { return gradient_energy(u) + robin_energy(u); }
    double lp_power(const Vector& u) const;
    double lp_power_on(const Vector& u, Region region) const;

    /// ∫ σ |∇u|^{p-2}∇u·∇φ_i for every node i.
    Vector gradient_action(const Vector& u) const;
    /// ∫_γ h |u|^{p-2}u φ_i.
    Vector robin_action(const Vector& u) const;
    /// ∫ |u|^{p-2}u φ_i.
    Vector mass_action(const Vector& u) const;
    /// ∫_γ ξ |u|^{p-2}u φ_i for a direction ξ laid out like h.
    Vector robin_action(const Vector& u, const RobinField& xi) const;

    /// ∫ σ C_e ∇φ_j·∇φ_i with one coefficient matrix per element.
    SparseMatrix stiffness(const std::vector<Eigen::Matrix2d>& coeff) const;
    /// ∫_γ h (u² + reg²)^{(p-2)/2} φ_i φ_j.
    SparseMatrix robin_matrix(const Vector& u, double reg) const;
    /// ∫ (u² + reg²)^{(p-2)/2} φ_i φ_j.
    SparseMatrix mass_matrix(const Vector& u, double reg) const;

private:
    const DiscreteDomain* domain_;
    double p_;
    std::vector<double> h_quad_;
    std::vector<double> sigma_;
    DofMap dofs_;
};

}  // namespace probin
