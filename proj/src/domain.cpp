#include "probin/domain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "probin/errors.hpp"

namespace probin {

namespace {

constexpr double kGauss3Points[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
constexpr double kGauss3Weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Degree-4 symmetric rule on the reference triangle, weights sum to 1.
constexpr double kTriA = 0.44594849091596489;
constexpr double kTriWA = 0.22338158967801147;
constexpr double kTriB = 0.091576213509770743;
constexpr double kTriWB = 0.10995174365532187;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * cross(b - a, c - a);
}

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

std::string to_string(DimMode mode) {
    switch (mode) {
        case DimMode::Interval: return "interval";
        case DimMode::Radial: return "radial";
        case DimMode::Planar: return "planar";
    }
    return "unknown";
}

std::string to_string(BoundaryLabel label) {
    switch (label) {
        case BoundaryLabel::Dirichlet: return "DIRICHLET";
        case BoundaryLabel::Robin: return "ROBIN";
        case BoundaryLabel::Outer: return "OUTER";
    }
    return "UNKNOWN";
}

double unit_sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

DiscreteDomain::DiscreteDomain(DimMode mode, int space_dim, std::vector<Point> nodes,
                               std::vector<std::array<int, 3>> elements, std::vector<Region> regions,
                               const std::vector<FaceSpec>& faces)
    : mode_(mode),
      space_dim_(space_dim),
      nodes_(std::move(nodes)),
      elements_(std::move(elements)),
      regions_(std::move(regions)) {
    if (mode_ == DimMode::Interval && space_dim_ != 1) {
        throw Error(ErrorCode::InvalidMesh, "interval mode requires space dimension 1");
    }
    if (mode_ == DimMode::Radial && space_dim_ < 2) {
        throw Error(ErrorCode::InvalidMesh, "radial mode requires space dimension >= 2");
    }
    if (mode_ == DimMode::Planar && space_dim_ != 2) {
        throw Error(ErrorCode::InvalidMesh, "planar mode requires space dimension 2");
    }
    if (nodes_.empty() || elements_.empty()) {
        throw Error(ErrorCode::InvalidMesh, "mesh has no nodes or no elements");
    }
    if (regions_.empty()) regions_.assign(elements_.size(), Region::Substrate);
    if (regions_.size() != elements_.size()) {
        throw Error(ErrorCode::InvalidMesh, "region tags do not match element count");
    }
    const int npe = nodes_per_element();
    const int n = static_cast<int>(nodes_.size());
    for (const auto& el : elements_) {
        for (int a = 0; a < npe; ++a) {
            if (el[a] < 0 || el[a] >= n) throw Error(ErrorCode::InvalidMesh, "element node index out of range");
            for (int b = 0; b < a; ++b) {
                if (el[a] == el[b]) throw Error(ErrorCode::InvalidMesh, "element repeats a node");
            }
        }
    }
    if (mode_ == DimMode::Radial) {
        for (const auto& x : nodes_) {
            if (x.x() < 0.0) throw Error(ErrorCode::InvalidMesh, "negative radius in radial mesh");
        }
    }
    build_quadrature();
    build_boundary(faces);
}

void DiscreteDomain::build_quadrature() {
    const size_t ne = elements_.size();
    grads_.resize(ne);
    volumes_.assign(ne, 0.0);
    if (mode_ == DimMode::Planar) {
        ref_shape_ = {{kTriA, kTriA, 1.0 - 2.0 * kTriA}, {kTriA, 1.0 - 2.0 * kTriA, kTriA},
                      {1.0 - 2.0 * kTriA, kTriA, kTriA}, {kTriB, kTriB, 1.0 - 2.0 * kTriB},
                      {kTriB, 1.0 - 2.0 * kTriB, kTriB}, {1.0 - 2.0 * kTriB, kTriB, kTriB}};
        const double ref_w[6] = {kTriWA, kTriWA, kTriWA, kTriWB, kTriWB, kTriWB};
        quad_weights_.assign(ne * 6, 0.0);
        radial_weight_.assign(ne * 6, 1.0);
        for (size_t e = 0; e < ne; ++e) {
            const auto& el = elements_[e];
            const Point& a = nodes_[el[0]];
            const Point& b = nodes_[el[1]];
            const Point& c = nodes_[el[2]];
            const double area = signed_area(a, b, c);
            if (!(area > 0.0)) throw Error(ErrorCode::InvalidMesh, "degenerate or inverted triangle");
            const double inv2a = 1.0 / (2.0 * area);
            grads_[e][0] = Point(b.y() - c.y(), c.x() - b.x()) * inv2a;
            grads_[e][1] = Point(c.y() - a.y(), a.x() - c.x()) * inv2a;
            grads_[e][2] = Point(a.y() - b.y(), b.x() - a.x()) * inv2a;
            for (int q = 0; q < 6; ++q) {
                quad_weights_[e * 6 + q] = ref_w[q] * area;
                volumes_[e] += ref_w[q] * area;
            }
        }
        face_ref_shape_.clear();
        for (double s : kGauss3Points) face_ref_shape_.push_back({1.0 - s, s});
        return;
    }

    ref_shape_.clear();
    for (double s : kGauss3Points) ref_shape_.push_back({1.0 - s, s, 0.0});
    quad_weights_.assign(ne * 3, 0.0);
    radial_weight_.assign(ne * 3, 1.0);
    const double sphere = mode_ == DimMode::Radial ? unit_sphere_area(space_dim_) : 1.0;
    for (size_t e = 0; e < ne; ++e) {
        auto& el = elements_[e];
        if (nodes_[el[0]].x() > nodes_[el[1]].x()) std::swap(el[0], el[1]);
        const double x0 = nodes_[el[0]].x();
        const double x1 = nodes_[el[1]].x();
        const double len = x1 - x0;
        if (!(len > 0.0)) throw Error(ErrorCode::InvalidMesh, "element with non-positive length");
        grads_[e][0] = Point(-1.0 / len, 0.0);
        grads_[e][1] = Point(1.0 / len, 0.0);
        grads_[e][2] = Point::Zero();
        for (int q = 0; q < 3; ++q) {
            const double x = x0 + kGauss3Points[q] * len;
            double rw = 1.0;
            if (mode_ == DimMode::Radial) {
                rw = std::pow(x, space_dim_ - 1);
                if (!(rw > 0.0)) throw Error(ErrorCode::InvalidMesh, "radial weight vanishes at a quadrature point");
            }
            radial_weight_[e * 3 + q] = rw;
            quad_weights_[e * 3 + q] = kGauss3Weights[q] * len * rw * sphere;
            volumes_[e] += quad_weights_[e * 3 + q];
        }
    }
    face_ref_shape_ = {{1.0, 0.0}};
}

void DiscreteDomain::build_boundary(const std::vector<FaceSpec>& face_specs) {
    const size_t n = nodes_.size();
    // Topological boundary: faces owned by exactly one element, with that element.
    std::map<std::pair<int, int>, std::pair<int, int>> owners;  // key -> (count, element)
    if (mode_ == DimMode::Planar) {
        for (size_t e = 0; e < elements_.size(); ++e) {
            const auto& el = elements_[e];
            for (int k = 0; k < 3; ++k) {
                auto& slot = owners[edge_key(el[k], el[(k + 1) % 3])];
                slot.first += 1;
                slot.second = static_cast<int>(e);
            }
        }
    } else {
        for (size_t e = 0; e < elements_.size(); ++e) {
            for (int k = 0; k < 2; ++k) {
                auto& slot = owners[{elements_[e][k], -1}];
                slot.first += 1;
                slot.second = static_cast<int>(e);
            }
        }
    }
    for (const auto& [key, owner] : owners) {
        if (owner.first > 2) throw Error(ErrorCode::InvalidMesh, "non-conforming mesh: face shared by more than two elements");
    }

    std::set<std::pair<int, int>> labeled;
    const double sphere = mode_ == DimMode::Radial ? unit_sphere_area(space_dim_) : 1.0;
    faces_.clear();
    for (const auto& desc : face_specs) {
        const int fn = mode_ == DimMode::Planar ? 2 : 1;
        if (desc.n_nodes != fn) throw Error(ErrorCode::InvalidMesh, "boundary face has the wrong number of nodes");
        for (int k = 0; k < fn; ++k) {
            if (desc.nodes[k] < 0 || desc.nodes[k] >= static_cast<int>(n)) {
                throw Error(ErrorCode::InvalidMesh, "boundary face node index out of range");
            }
        }
        const auto key = fn == 2 ? edge_key(desc.nodes[0], desc.nodes[1]) : std::pair<int, int>{desc.nodes[0], -1};
        const auto it = owners.find(key);
        if (it == owners.end() || it->second.first != 1) {
            throw Error(ErrorCode::InvalidMesh, "labeled face is not a boundary face of the mesh (orphan edge)");
        }
        if (!labeled.insert(key).second) throw Error(ErrorCode::InvalidMesh, "boundary face labeled twice");

        BoundaryFace face;
        face.nodes = desc.nodes;
        face.n_nodes = fn;
        face.label = desc.label;
        const auto& el = elements_[it->second.second];
        if (fn == 1) {
            const int i = desc.nodes[0];
            const int j = el[0] == i ? el[1] : el[0];
            face.normal = Point(nodes_[i].x() > nodes_[j].x() ? 1.0 : -1.0, 0.0);
            face.measure = mode_ == DimMode::Radial ? sphere * std::pow(nodes_[i].x(), space_dim_ - 1) : 1.0;
        } else {
            const Point& a = nodes_[desc.nodes[0]];
            const Point& b = nodes_[desc.nodes[1]];
            int c = el[0];
            for (int k = 0; k < 3; ++k) {
                if (el[k] != desc.nodes[0] && el[k] != desc.nodes[1]) c = el[k];
            }
            const Point t = b - a;
            face.measure = t.norm();
            Point nrm(t.y(), -t.x());
            nrm /= face.measure;
            if (nrm.dot(nodes_[c] - a) > 0.0) nrm = -nrm;
            face.normal = nrm;
        }
        faces_.push_back(face);
    }

    for (const auto& [key, owner] : owners) {
        if (owner.first != 1 || labeled.count(key)) continue;
        // The centre of a radial ball is an element end but not a boundary.
        if (mode_ == DimMode::Radial && nodes_[key.first].x() == 0.0) continue;
        throw Error(ErrorCode::InvalidMesh, "unlabeled boundary face");
    }

    fixed_.assign(n, false);
    interface_.assign(n, false);
    std::vector<bool> on_robin(n, false);
    partition_ = {};
    for (size_t f = 0; f < faces_.size(); ++f) {
        const auto& face = faces_[f];
        switch (face.label) {
            case BoundaryLabel::Dirichlet: partition_.dirichlet_faces.push_back(static_cast<int>(f)); break;
            case BoundaryLabel::Robin: partition_.robin_faces.push_back(static_cast<int>(f)); break;
            case BoundaryLabel::Outer: partition_.outer_faces.push_back(static_cast<int>(f)); break;
        }
        for (int v : face.node_span()) {
            if (face.label == BoundaryLabel::Robin) {
                on_robin[v] = true;
            } else {
                fixed_[v] = true;
            }
        }
    }
    for (size_t v = 0; v < n; ++v) {
        if (on_robin[v] && fixed_[v]) {
            interface_[v] = true;
            partition_.interface_nodes.push_back(static_cast<int>(v));
        }
    }

    const size_t nq = face_ref_shape_.size();
    face_weights_.assign(faces_.size() * nq, 0.0);
    for (size_t f = 0; f < faces_.size(); ++f) {
        for (size_t q = 0; q < nq; ++q) {
            face_weights_[f * nq + q] = nq == 1 ? faces_[f].measure : kGauss3Weights[q] * faces_[f].measure;
        }
    }
}

std::vector<int> DiscreteDomain::faces_with_label(BoundaryLabel label) const {
    switch (label) {
        case BoundaryLabel::Dirichlet: return partition_.dirichlet_faces;
        case BoundaryLabel::Robin: return partition_.robin_faces;
        case BoundaryLabel::Outer: return partition_.outer_faces;
    }
    return {};
}

std::vector<int> DiscreteDomain::fixed_faces() const {
    std::vector<int> out = partition_.dirichlet_faces;
    out.insert(out.end(), partition_.outer_faces.begin(), partition_.outer_faces.end());
    std::sort(out.begin(), out.end());
    return out;
}

ThicknessProfile ThicknessProfile::uniform(const DiscreteDomain& base, double rho) {
    ThicknessProfile out;
    out.rho_values.assign(base.partition().robin_faces.size(), rho);
    out.validate(base);
    return out;
}

void ThicknessProfile::validate(const DiscreteDomain& base) const {
    if (rho_values.size() != base.partition().robin_faces.size()) {
        throw Error(ErrorCode::InvalidParameter, "thickness profile needs one value per Robin face");
    }
    for (double r : rho_values) {
        if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidParameter, "thickness must be positive and finite");
    }
}

DiscreteDomain build_interval_domain(int n_cells, GammaEnd gamma_end) {
    if (n_cells < 2) throw Error(ErrorCode::InvalidMesh, "interval mesh needs at least 2 cells");
    std::vector<Point> nodes;
    for (int i = 0; i <= n_cells; ++i) nodes.emplace_back(static_cast<double>(i) / n_cells, 0.0);
    std::vector<std::array<int, 3>> elements;
    for (int i = 0; i < n_cells; ++i) elements.push_back({i, i + 1, -1});
    const bool left_robin = gamma_end == GammaEnd::Left || gamma_end == GammaEnd::Both;
    const bool right_robin = gamma_end == GammaEnd::Right || gamma_end == GammaEnd::Both;
    std::vector<FaceSpec> faces = {
        {{0, -1}, 1, left_robin ? BoundaryLabel::Robin : BoundaryLabel::Dirichlet},
        {{n_cells, -1}, 1, right_robin ? BoundaryLabel::Robin : BoundaryLabel::Dirichlet},
    };
    return DiscreteDomain(DimMode::Interval, 1, std::move(nodes), std::move(elements), {}, faces);
}

DiscreteDomain build_radial_domain(int n_cells, double r_inner, double r_outer, int space_dim,
                                   RadialPartition partition) {
    if (n_cells < 2) throw Error(ErrorCode::InvalidMesh, "radial mesh needs at least 2 cells");
    if (!(r_inner >= 0.0) || !(r_inner < r_outer) || !std::isfinite(r_outer)) {
        throw Error(ErrorCode::InvalidMesh, "radial mesh requires 0 <= r_inner < r_outer");
    }
    if (space_dim < 2) throw Error(ErrorCode::InvalidMesh, "radial mode requires space dimension >= 2");
    if (partition.inner == BoundaryLabel::Outer || partition.outer == BoundaryLabel::Outer) {
        throw Error(ErrorCode::InvalidParameter, "radial partition labels must be DIRICHLET or ROBIN");
    }
    std::vector<Point> nodes;
    for (int i = 0; i <= n_cells; ++i) {
        nodes.emplace_back(r_inner + (r_outer - r_inner) * static_cast<double>(i) / n_cells, 0.0);
    }
    nodes.back().x() = r_outer;
    std::vector<std::array<int, 3>> elements;
    for (int i = 0; i < n_cells; ++i) elements.push_back({i, i + 1, -1});
    std::vector<FaceSpec> faces;
    if (r_inner > 0.0) faces.push_back({{0, -1}, 1, partition.inner});
    faces.push_back({{n_cells, -1}, 1, partition.outer});
    return DiscreteDomain(DimMode::Radial, space_dim, std::move(nodes), std::move(elements), {}, faces);
}

DiscreteDomain build_planar_domain(const std::vector<Point>& vertices,
                                   const std::vector<std::array<int, 3>>& triangles,
                                   const std::vector<FaceSpec>& face_labels) {
    std::vector<std::array<int, 3>> oriented = triangles;
    const int n = static_cast<int>(vertices.size());
    for (auto& t : oriented) {
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= n) throw Error(ErrorCode::InvalidMesh, "triangle node index out of range");
        }
        if (signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0) std::swap(t[1], t[2]);
    }
    return DiscreteDomain(DimMode::Planar, 2, vertices, std::move(oriented), {}, face_labels);
}

namespace {

CoatedDomain coat_one_dimensional(const DiscreteDomain& base, const ThicknessProfile& rho, double epsilon,
                                  int m) {
    std::vector<Point> nodes = base.nodes();
    std::vector<std::array<int, 3>> elements = base.elements();
    std::vector<Region> regions = base.regions();
    std::vector<FaceSpec> faces;
    std::vector<int> layer_elements;
    const auto& robin = base.partition().robin_faces;
    for (size_t f = 0; f < base.boundary_faces().size(); ++f) {
        const auto& face = base.boundary_faces()[f];
        if (face.label != BoundaryLabel::Robin) faces.push_back({face.nodes, face.n_nodes, face.label});
    }
    for (size_t k = 0; k < robin.size(); ++k) {
        const auto& face = base.boundary_faces()[robin[k]];
        const double s = face.normal.x();
        const double x0 = base.nodes()[face.nodes[0]].x();
        const double thickness = epsilon * rho.rho_values[k];
        const double x_end = x0 + s * thickness;
        if (base.mode() == DimMode::Radial && !(x_end > 0.0)) {
            throw Error(ErrorCode::MeshFoldover, "inward coating reaches the radial centre");
        }
        int prev = face.nodes[0];
        for (int j = 1; j <= m; ++j) {
            const double x = j == m ? x_end : x0 + s * thickness * j / m;
            nodes.emplace_back(x, 0.0);
            const int cur = static_cast<int>(nodes.size()) - 1;
            layer_elements.push_back(static_cast<int>(elements.size()));
            elements.push_back({prev, cur, -1});
            regions.push_back(Region::Coating);
            prev = cur;
        }
        faces.push_back({{prev, -1}, 1, BoundaryLabel::Outer});
    }
    DiscreteDomain coated(base.mode(), base.space_dim(), std::move(nodes), std::move(elements),
                          std::move(regions), faces);
    CoatedDomain out{base, std::move(coated), epsilon, rho, base.num_nodes(), std::move(layer_elements), {}};
    out.outer_dirichlet_faces = out.domain.partition().outer_faces;
    return out;
}

CoatedDomain coat_planar(const DiscreteDomain& base, const ThicknessProfile& rho, double epsilon, int m) {
    std::vector<Point> nodes = base.nodes();
    std::vector<std::array<int, 3>> elements = base.elements();
    std::vector<Region> regions = base.regions();
    const auto& robin = base.partition().robin_faces;
    const auto& bfaces = base.boundary_faces();

    // Per γ-node: accumulated normal, thickness and incident γ-face count.
    std::map<int, Point> dir;
    std::map<int, double> rho_sum;
    std::map<int, int> count;
    for (size_t k = 0; k < robin.size(); ++k) {
        const auto& face = bfaces[robin[k]];
        for (int v : face.node_span()) {
            auto [it, inserted] = dir.try_emplace(v, Point::Zero());
            it->second += face.normal;
            rho_sum[v] += rho.rho_values[k];
            count[v] += 1;
        }
    }
    // Column of extruded nodes per γ-node; column[v][0] = v.
    std::map<int, std::vector<int>> column;
    for (const auto& [v, d] : dir) {
        const Point unit = d.normalized();
        const double thick = epsilon * rho_sum[v] / count[v];
        std::vector<int> col{v};
        for (int j = 1; j <= m; ++j) {
            nodes.push_back(base.nodes()[v] + unit * (thick * j / m));
            col.push_back(static_cast<int>(nodes.size()) - 1);
        }
        column[v] = std::move(col);
    }

    std::vector<FaceSpec> faces;
    for (const auto& face : bfaces) {
        if (face.label != BoundaryLabel::Robin) faces.push_back({face.nodes, face.n_nodes, face.label});
    }
    std::vector<int> layer_elements;
    for (size_t k = 0; k < robin.size(); ++k) {
        const auto& face = bfaces[robin[k]];
        int a = face.nodes[0];
        int b = face.nodes[1];
        // Order (a, b) so that (a, b, a + ν) is counter-clockwise.
        if (cross(base.nodes()[b] - base.nodes()[a], face.normal) < 0.0) std::swap(a, b);
        const auto& ca = column[a];
        const auto& cb = column[b];
        for (int j = 0; j < m; ++j) {
            const std::array<std::array<int, 3>, 2> tris = {{{ca[j], cb[j], cb[j + 1]}, {ca[j], cb[j + 1], ca[j + 1]}}};
            for (const auto& t : tris) {
                if (!(signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]) > 0.0)) {
                    throw Error(ErrorCode::MeshFoldover, "coating extrusion produced an inverted triangle");
                }
                layer_elements.push_back(static_cast<int>(elements.size()));
                elements.push_back(t);
                regions.push_back(Region::Coating);
            }
        }
        faces.push_back({{ca[m], cb[m]}, 2, BoundaryLabel::Outer});
    }
    // Open ends of the γ chain get an outer side wall.
    for (const auto& [v, c] : count) {
        if (c != 1) continue;
        const auto& col = column[v];
        for (int j = 0; j < m; ++j) faces.push_back({{col[j], col[j + 1]}, 2, BoundaryLabel::Outer});
    }
    DiscreteDomain coated(DimMode::Planar, 2, std::move(nodes), std::move(elements), std::move(regions), faces);
    CoatedDomain out{base, std::move(coated), epsilon, rho, base.num_nodes(), std::move(layer_elements), {}};
    out.outer_dirichlet_faces = out.domain.partition().outer_faces;
    return out;
}

}  // namespace

CoatedDomain attach_coating(const DiscreteDomain& base, const ThicknessProfile& rho, double epsilon,
                            int n_layer_cells) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error(ErrorCode::InvalidParameter, "epsilon must be positive");
    if (n_layer_cells < 1) throw Error(ErrorCode::InvalidParameter, "coating needs at least one layer cell");
    if (base.partition().robin_faces.empty()) throw Error(ErrorCode::InvalidParameter, "base domain has no Robin boundary to coat");
    for (auto r : base.regions()) {
        if (r == Region::Coating) throw Error(ErrorCode::InvalidParameter, "base domain is already coated");
    }
    rho.validate(base);
    if (base.mode() == DimMode::Planar) return coat_planar(base, rho, epsilon, n_layer_cells);
    return coat_one_dimensional(base, rho, epsilon, n_layer_cells);
}

double integrate_boundary(const DiscreteDomain& domain, BoundaryLabel label, std::span<const double> integrand) {
    const auto faces = domain.faces_with_label(label);
    if (integrand.size() != faces.size()) {
        throw Error(ErrorCode::InvalidParameter, "integrand needs one value per face with the label");
    }
    double total = 0.0;
    for (size_t k = 0; k < faces.size(); ++k) total += domain.boundary_faces()[faces[k]].measure * integrand[k];
    return total;
}

PlanarMesh unit_square_mesh(int n, const std::vector<std::string>& robin_sides) {
    if (n < 1) throw Error(ErrorCode::InvalidMesh, "square mesh needs at least one cell per side");
    PlanarMesh mesh;
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) mesh.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    auto label_of = [&](const std::string& side) {
        return std::find(robin_sides.begin(), robin_sides.end(), side) != robin_sides.end() ? BoundaryLabel::Robin
                                                                                           : BoundaryLabel::Dirichlet;
    };
    for (int i = 0; i < n; ++i) {
        mesh.faces.push_back({{id(i, 0), id(i + 1, 0)}, 2, label_of("bottom")});
        mesh.faces.push_back({{id(n, i), id(n, i + 1)}, 2, label_of("right")});
        mesh.faces.push_back({{id(i, n), id(i + 1, n)}, 2, label_of("top")});
        mesh.faces.push_back({{id(0, i), id(0, i + 1)}, 2, label_of("left")});
    }
    return mesh;
}

PlanarMesh annulus_mesh(int n_radial, int n_angular, double r_inner, double r_outer, const std::string& gamma) {
    if (n_radial < 1 || n_angular < 3 || !(r_inner > 0.0) || !(r_inner < r_outer)) {
        throw Error(ErrorCode::InvalidMesh, "annulus mesh requires n_radial >= 1, n_angular >= 3, 0 < r_inner < r_outer");
    }
    if (gamma != "inner" && gamma != "outer") throw Error(ErrorCode::InvalidParameter, "annulus gamma must be inner or outer");
    PlanarMesh mesh;
    auto id = [n_angular](int ring, int j) { return ring * n_angular + (j % n_angular); };
    for (int ring = 0; ring <= n_radial; ++ring) {
        const double r = r_inner + (r_outer - r_inner) * ring / n_radial;
        for (int j = 0; j < n_angular; ++j) {
            const double t = 2.0 * std::numbers::pi * j / n_angular;
            mesh.vertices.emplace_back(r * std::cos(t), r * std::sin(t));
        }
    }
    for (int ring = 0; ring < n_radial; ++ring) {
        for (int j = 0; j < n_angular; ++j) {
            mesh.triangles.push_back({id(ring, j), id(ring + 1, j), id(ring + 1, j + 1)});
            mesh.triangles.push_back({id(ring, j), id(ring + 1, j + 1), id(ring, j + 1)});
        }
    }
    const auto inner = gamma == "inner" ? BoundaryLabel::Robin : BoundaryLabel::Dirichlet;
    const auto outer = gamma == "outer" ? BoundaryLabel::Robin : BoundaryLabel::Dirichlet;
    for (int j = 0; j < n_angular; ++j) {
        mesh.faces.push_back({{id(0, j), id(0, j + 1)}, 2, inner});
        mesh.faces.push_back({{id(n_radial, j), id(n_radial, j + 1)}, 2, outer});
    }
    return mesh;
}

PlanarMesh disk_mesh(int levels, BoundaryLabel boundary_label) {
    if (levels < 0) throw Error(ErrorCode::InvalidMesh, "refinement level must be nonnegative");
    PlanarMesh mesh;
    mesh.vertices.emplace_back(0.0, 0.0);
    for (int j = 0; j < 6; ++j) {
        const double t = std::numbers::pi * j / 3.0;
        mesh.vertices.emplace_back(std::cos(t), std::sin(t));
    }
    for (int j = 0; j < 6; ++j) mesh.triangles.push_back({0, 1 + j, 1 + (j + 1) % 6});
    std::set<std::pair<int, int>> boundary;
    for (int j = 0; j < 6; ++j) boundary.insert(edge_key(1 + j, 1 + (j + 1) % 6));

    for (int level = 0; level < levels; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = edge_key(a, b);
            if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
            Point m = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
            if (boundary.count(key)) m.normalize();
            mesh.vertices.push_back(m);
            const int idx = static_cast<int>(mesh.vertices.size()) - 1;
            midpoint[key] = idx;
            return idx;
        };
        std::vector<std::array<int, 3>> refined;
        for (const auto& t : mesh.triangles) {
            const int ab = mid(t[0], t[1]);
            const int bc = mid(t[1], t[2]);
            const int ca = mid(t[2], t[0]);
            refined.push_back({t[0], ab, ca});
            refined.push_back({ab, t[1], bc});
            refined.push_back({ca, bc, t[2]});
            refined.push_back({ab, bc, ca});
        }
        std::set<std::pair<int, int>> next_boundary;
        for (const auto& key : boundary) {
            const int m = midpoint.at(key);
            next_boundary.insert(edge_key(key.first, m));
            next_boundary.insert(edge_key(m, key.second));
        }
        mesh.triangles = std::move(refined);
        boundary = std::move(next_boundary);
    }
    for (const auto& key : boundary) mesh.faces.push_back({{key.first, key.second}, 2, boundary_label});
    return mesh;
}

}  // namespace probin
