#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace probin {

enum class DimMode { Interval, Radial, Planar };
enum class BoundaryLabel { Dirichlet, Robin, Outer };
enum class Region { Substrate, Coating };
enum class GammaEnd { Left, Right, Both, None };

std::string to_string(DimMode mode);
std::string to_string(BoundaryLabel label);

using Point = Eigen::Vector2d;  // 1D modes only use x()

/// A boundary face: an endpoint in the 1D modes, an edge in planar mode.
struct BoundaryFace {
    std::array<int, 2> nodes{-1, -1};
    int n_nodes = 1;
    Point normal = Point::Zero();
    double measure = 0.0;
    BoundaryLabel label = BoundaryLabel::Dirichlet;

    std::span<const int> node_span() const { return {nodes.data(), static_cast<size_t>(n_nodes)}; }
};

/// Face indices grouped by label. `dirichlet_faces` is Γ_D, `robin_faces` is γ,
/// `outer_faces` the Dirichlet skin of a coating. `interface_nodes` is the node
/// set shared by closure(Γ_D) and closure(γ); it carries no surface measure.
struct BoundaryPartition {
    std::vector<int> dirichlet_faces;
    std::vector<int> robin_faces;
    std::vector<int> outer_faces;
    std::vector<int> interface_nodes;
};

/// Raw face description used by the builders and the mesh reader.
struct FaceSpec {
    std::array<int, 2> nodes{-1, -1};
    int n_nodes = 1;
    BoundaryLabel label = BoundaryLabel::Dirichlet;
};

/// Conforming P1 mesh with precomputed quadrature.
///
/// Element quadrature weights already contain the Jacobian and, in radial mode,
/// the factor |S^{n-1}| r^{n-1}, so `Σ_q w_q f(x_q)` approximates ∫ f dx on the
/// full n-dimensional domain. Face weights likewise integrate against dσ.
/// Immutable after construction.
class DiscreteDomain {
public:
    DiscreteDomain(DimMode mode, int space_dim, std::vector<Point> nodes,
                   std::vector<std::array<int, 3>> elements, std::vector<Region> regions,
                   const std::vector<FaceSpec>& faces);

    DimMode mode() const { return mode_; }
    /// Ambient dimension n (1 for interval, n for radial, 2 for planar).
    int space_dim() const { return space_dim_; }
    /// Number of gradient components (1 in the 1D modes, 2 in planar mode).
    int grad_dim() const { return mode_ == DimMode::Planar ? 2 : 1; }
    int nodes_per_element() const { return mode_ == DimMode::Planar ? 3 : 2; }

    size_t num_nodes() const { return nodes_.size(); }
    size_t num_elements() const { return elements_.size(); }
    const std::vector<Point>& nodes() const { return nodes_; }
    const std::vector<std::array<int, 3>>& elements() const { return elements_; }
    std::span<const int> element_nodes(size_t e) const {
        return {elements_[e].data(), static_cast<size_t>(nodes_per_element())};
    }
    Region region(size_t e) const { return regions_[e]; }
    const std::vector<Region>& regions() const { return regions_; }

    int quad_points_per_element() const { return static_cast<int>(ref_shape_.size()); }
    /// Reference shape values N_a at each element quadrature point.
    const std::vector<std::array<double, 3>>& quad_shape() const { return ref_shape_; }
    std::span<const double> quad_weights(size_t e) const {
        const size_t nq = ref_shape_.size();
        return {quad_weights_.data() + e * nq, nq};
    }
    /// r^{n-1} at each quadrature point (1 outside radial mode).
    std::span<const double> radial_weight(size_t e) const {
        const size_t nq = ref_shape_.size();
        return {radial_weight_.data() + e * nq, nq};
    }
    /// Element-constant gradients of the P1 basis functions.
    const std::array<Point, 3>& shape_gradients(size_t e) const { return grads_[e]; }
    /// Weighted element measure Σ_q w_q.
    double element_volume(size_t e) const { return volumes_[e]; }

    const std::vector<BoundaryFace>& boundary_faces() const { return faces_; }
    const BoundaryPartition& partition() const { return partition_; }

    int face_quad_points() const { return static_cast<int>(face_ref_shape_.size()); }
    const std::vector<std::array<double, 2>>& face_quad_shape() const { return face_ref_shape_; }
    std::span<const double> face_quad_weights(size_t f) const {
        const size_t nq = face_ref_shape_.size();
        return {face_weights_.data() + f * nq, nq};
    }

    /// True on nodes carrying a homogeneous Dirichlet condition (Γ_D or outer skin).
    bool is_fixed(size_t node) const { return fixed_[node]; }
    const std::vector<bool>& fixed_mask() const { return fixed_; }
    bool is_interface(size_t node) const { return interface_[node]; }

    std::vector<int> faces_with_label(BoundaryLabel label) const;
    /// Γ_D ∪ outer skin; these are the faces on which the eigensolver pins zero.
    std::vector<int> fixed_faces() const;

private:
    void build_quadrature();
    void build_boundary(const std::vector<FaceSpec>& faces);

    DimMode mode_;
    int space_dim_;
    std::vector<Point> nodes_;
    std::vector<std::array<int, 3>> elements_;
    std::vector<Region> regions_;

    std::vector<std::array<double, 3>> ref_shape_;
    std::vector<double> quad_weights_;
    std::vector<double> radial_weight_;
    std::vector<std::array<Point, 3>> grads_;
    std::vector<double> volumes_;

    std::vector<BoundaryFace> faces_;
    BoundaryPartition partition_;
    std::vector<std::array<double, 2>> face_ref_shape_;
    std::vector<double> face_weights_;
    std::vector<bool> fixed_;
    std::vector<bool> interface_;
};

/// Positive coating thickness per γ-face, in units of ε.
struct ThicknessProfile {
    std::vector<double> rho_values;

    static ThicknessProfile uniform(const DiscreteDomain& base, double rho);
    void validate(const DiscreteDomain& base) const;
};

/// Ω_ε = Ω ∪ Σ_ε. Base nodes keep their indices inside `domain`, so the first
/// `base_node_count` entries of a nodal vector on `domain` are its restriction
/// to Ω.
struct CoatedDomain {
    DiscreteDomain base;
    DiscreteDomain domain;
    double epsilon = 0.0;
    ThicknessProfile rho;
    size_t base_node_count = 0;
    std::vector<int> layer_elements;
    std::vector<int> outer_dirichlet_faces;
};

/// Labels of the two spheres in radial mode. The inner label is ignored for a
/// ball (r_inner = 0), whose centre is not a boundary.
struct RadialPartition {
    BoundaryLabel inner = BoundaryLabel::Dirichlet;
    BoundaryLabel outer = BoundaryLabel::Robin;
};

/// Surface area of the unit sphere S^{n-1} in R^n.
double unit_sphere_area(int n);

DiscreteDomain build_interval_domain(int n_cells, GammaEnd gamma_end);
DiscreteDomain build_radial_domain(int n_cells, double r_inner, double r_outer, int space_dim,
                                   RadialPartition partition);
DiscreteDomain build_planar_domain(const std::vector<Point>& vertices,
                                   const std::vector<std::array<int, 3>>& triangles,
                                   const std::vector<FaceSpec>& face_labels);

CoatedDomain attach_coating(const DiscreteDomain& base, const ThicknessProfile& rho, double epsilon,
                            int n_layer_cells);

/// ∫ over the faces with `label` of a face-constant integrand. `integrand` has
/// one entry per face carrying that label, in `faces_with_label` order.
double integrate_boundary(const DiscreteDomain& domain, BoundaryLabel label,
                          std::span<const double> integrand);

// Planar mesh generators used by tests, the CLI and the Python bindings.

struct PlanarMesh {
    std::vector<Point> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<FaceSpec> faces;
};

/// Structured unit square, `n`×`n` cells split into triangles; `robin_sides`
/// is a subset of "bottom", "right", "top", "left", the rest is Dirichlet.
PlanarMesh unit_square_mesh(int n, const std::vector<std::string>& robin_sides);
/// Polygonal annulus r_inner < r < r_outer. The sphere named by `gamma` ("inner"
/// or "outer") is labeled Robin, the other Dirichlet.
PlanarMesh annulus_mesh(int n_radial, int n_angular, double r_inner, double r_outer,
                        const std::string& gamma);
/// Unit disk from a hexagon by `levels` rounds of uniform refinement with
/// boundary midpoints projected onto the circle.
PlanarMesh disk_mesh(int levels, BoundaryLabel boundary_label);

}  // namespace probin
