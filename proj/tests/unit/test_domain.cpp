#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "probin/domain.hpp"
#include "probin/errors.hpp"
#include "probin/mesh_io.hpp"

using namespace probin;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a probin::Error");
    return ErrorCode::IoError;
}

double label_measure(const DiscreteDomain& d, BoundaryLabel label) {
    double m = 0.0;
    for (int f : d.faces_with_label(label)) m += d.boundary_faces()[f].measure;
    return m;
}

double polygon_perimeter(const std::vector<Point>& ring) {
    double s = 0.0;
    for (size_t i = 0; i < ring.size(); ++i) s += (ring[(i + 1) % ring.size()] - ring[i]).norm();
    return s;
}

void check_basic_invariants(const DiscreteDomain& d) {
    for (size_t e = 0; e < d.num_elements(); ++e) {
        CHECK(d.element_volume(e) > 0.0);
        for (double w : d.quad_weights(e)) CHECK(w > 0.0);
        if (d.mode() == DimMode::Radial) {
            for (double r : d.radial_weight(e)) CHECK(r > 0.0);
        }
    }
    // Each boundary face carries exactly one label.
    const auto& part = d.partition();
    std::vector<int> count(d.boundary_faces().size(), 0);
    for (int f : part.dirichlet_faces) ++count[f];
    for (int f : part.robin_faces) ++count[f];
    for (int f : part.outer_faces) ++count[f];
    for (int c : count) CHECK(c == 1);
}

}  // namespace

TEST_SUITE("domain") {

TEST_CASE("interval with gamma on the right end") {
    const auto d = build_interval_domain(4, GammaEnd::Right);
    CHECK(d.num_nodes() == 5);
    CHECK(d.num_elements() == 4);
    const auto& part = d.partition();
    REQUIRE(part.dirichlet_faces.size() == 1);
    REQUIRE(part.robin_faces.size() == 1);
    CHECK(d.nodes()[d.boundary_faces()[part.dirichlet_faces[0]].nodes[0]].x() == 0.0);
    CHECK(d.nodes()[d.boundary_faces()[part.robin_faces[0]].nodes[0]].x() == 1.0);
    CHECK(d.boundary_faces()[part.robin_faces[0]].measure == 1.0);
    check_basic_invariants(d);
}

TEST_CASE("interval without gamma is pure Dirichlet") {
    const auto d = build_interval_domain(4, GammaEnd::None);
    CHECK(d.partition().dirichlet_faces.size() == 2);
    CHECK(d.partition().robin_faces.empty());
    CHECK(d.is_fixed(0));
    CHECK(d.is_fixed(4));
}

TEST_CASE("interval needs two cells") {
    CHECK(code_of([] { build_interval_domain(1, GammaEnd::Right); }) == ErrorCode::InvalidMesh);
}

TEST_CASE("radial weight is r^(n-1)") {
    for (int n : {2, 3}) {
        const auto d = build_radial_domain(64, 0.5, 1.0, n, {});
        check_basic_invariants(d);
        const auto& shape = d.quad_shape();
        for (size_t e = 0; e < d.num_elements(); ++e) {
            const auto nodes = d.element_nodes(e);
            const auto rw = d.radial_weight(e);
            for (size_t q = 0; q < shape.size(); ++q) {
                const double r = shape[q][0] * d.nodes()[nodes[0]].x() + shape[q][1] * d.nodes()[nodes[1]].x();
                CHECK(rw[q] == doctest::Approx(std::pow(r, n - 1)).epsilon(1e-14));
            }
        }
        CHECK(d.partition().dirichlet_faces.size() == 1);
        CHECK(d.partition().robin_faces.size() == 1);
    }
}

TEST_CASE("radial volume of an annulus") {
    const auto d = build_radial_domain(64, 0.5, 1.0, 2, {});
    double vol = 0.0;
    for (size_t e = 0; e < d.num_elements(); ++e) vol += d.element_volume(e);
    // Quadrature of the linear weight r is exact.
    CHECK(vol == doctest::Approx(std::numbers::pi * (1.0 - 0.25)).epsilon(1e-13));
}

TEST_CASE("radial mesh rejects inverted radii") {
    CHECK(code_of([] { build_radial_domain(64, 1.0, 0.5, 2, {}); }) == ErrorCode::InvalidMesh);
}

TEST_CASE("unit square with gamma on the bottom edge") {
    const auto m = unit_square_mesh(8, {"bottom"});
    const auto d = build_planar_domain(m.vertices, m.triangles, m.faces);
    check_basic_invariants(d);
    CHECK(label_measure(d, BoundaryLabel::Robin) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(label_measure(d, BoundaryLabel::Dirichlet) == doctest::Approx(3.0).epsilon(1e-15));
    // The two bottom corners are shared by Γ_D and γ.
    CHECK(d.partition().interface_nodes.size() == 2);
}

TEST_CASE("orphan or missing boundary labels are rejected") {
    auto m = unit_square_mesh(2, {"bottom"});
    SUBCASE("label on an interior edge") {
        auto faces = m.faces;
        faces.push_back({{0, 4}, 2, BoundaryLabel::Robin});  // node 4 is the centre of a 2x2 grid
        CHECK(code_of([&] { build_planar_domain(m.vertices, m.triangles, faces); }) == ErrorCode::InvalidMesh);
    }
    SUBCASE("boundary edge without a label") {
        auto faces = m.faces;
        faces.pop_back();
        CHECK(code_of([&] { build_planar_domain(m.vertices, m.triangles, faces); }) == ErrorCode::InvalidMesh);
    }
    SUBCASE("edge labeled twice") {
        auto faces = m.faces;
        faces.push_back(faces.front());
        CHECK(code_of([&] { build_planar_domain(m.vertices, m.triangles, faces); }) == ErrorCode::InvalidMesh);
    }
}

TEST_CASE("refined disk with Robin boundary is a valid domain") {
    const auto m = disk_mesh(6, BoundaryLabel::Robin);
    const auto d = build_planar_domain(m.vertices, m.triangles, m.faces);
    check_basic_invariants(d);
    CHECK(d.partition().dirichlet_faces.empty());
    CHECK(label_measure(d, BoundaryLabel::Robin) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-5));
}

TEST_CASE("interval coating") {
    const auto base = build_interval_domain(4, GammaEnd::Right);
    const auto c = attach_coating(base, ThicknessProfile::uniform(base, 1.0), 0.1, 3);
    double xmax = 0.0;
    for (const auto& x : c.domain.nodes()) xmax = std::max(xmax, x.x());
    CHECK(xmax == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(c.layer_elements.size() == 3);
    for (int e : c.layer_elements) {
        CHECK(c.domain.region(e) == Region::Coating);
        for (int n : c.domain.element_nodes(e)) CHECK(c.domain.nodes()[n].x() >= 1.0);
    }
    // Coating volume is exactly ε·ρ in interval mode.
    double vol = 0.0;
    for (int e : c.layer_elements) vol += c.domain.element_volume(e);
    CHECK(vol == doctest::Approx(0.1).epsilon(1e-14));
    // Base nodes keep their indices.
    for (size_t i = 0; i < base.num_nodes(); ++i) CHECK(c.domain.nodes()[i].x() == base.nodes()[i].x());
    CHECK(c.domain.partition().robin_faces.empty());
    CHECK(c.outer_dirichlet_faces.size() == 1);
}

TEST_CASE("radial coating reaches r_outer + epsilon rho") {
    const auto base = build_radial_domain(64, 0.5, 1.0, 2, {});
    const auto c = attach_coating(base, ThicknessProfile::uniform(base, 2.0), 0.05, 4);
    double rmax = 0.0;
    for (const auto& x : c.domain.nodes()) rmax = std::max(rmax, x.x());
    CHECK(rmax == doctest::Approx(1.1).epsilon(1e-14));
    double vol = 0.0;
    for (int e : c.layer_elements) vol += c.domain.element_volume(e);
    CHECK(vol == doctest::Approx(std::numbers::pi * (1.1 * 1.1 - 1.0)).epsilon(1e-12));
}

TEST_CASE("coating rejects a nonpositive epsilon") {
    const auto base = build_interval_domain(4, GammaEnd::Right);
    CHECK(code_of([&] { attach_coating(base, ThicknessProfile::uniform(base, 1.0), 0.0, 2); }) ==
          ErrorCode::InvalidParameter);
    CHECK(code_of([&] { attach_coating(base, ThicknessProfile::uniform(base, 1.0), -0.1, 2); }) ==
          ErrorCode::InvalidParameter);
    const auto plain = build_interval_domain(4, GammaEnd::None);
    CHECK(code_of([&] { attach_coating(plain, ThicknessProfile{}, 0.1, 2); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("inward planar coating that crosses itself is a fold-over") {
    const auto m = annulus_mesh(2, 24, 0.3, 1.0, "inner");
    const auto base = build_planar_domain(m.vertices, m.triangles, m.faces);
    CHECK(code_of([&] { attach_coating(base, ThicknessProfile::uniform(base, 1.0), 0.5, 2); }) ==
          ErrorCode::MeshFoldover);
}

TEST_CASE("planar coating volume is epsilon times the weighted perimeter to first order") {
    const auto m = unit_square_mesh(8, {"bottom"});
    const auto base = build_planar_domain(m.vertices, m.triangles, m.faces);
    for (double eps : {0.04, 0.02, 0.01}) {
        const auto c = attach_coating(base, ThicknessProfile::uniform(base, 1.5), eps, 2);
        check_basic_invariants(c.domain);
        double vol = 0.0;
        for (int e : c.layer_elements) vol += c.domain.element_volume(e);
        CHECK(std::abs(vol - eps * 1.5 * 1.0) <= 4.0 * eps * eps);
    }
    const auto ma = annulus_mesh(3, 64, 0.5, 1.0, "outer");
    const auto ann = build_planar_domain(ma.vertices, ma.triangles, ma.faces);
    const double perimeter = label_measure(ann, BoundaryLabel::Robin);
    for (double eps : {0.04, 0.02, 0.01}) {
        const auto c = attach_coating(ann, ThicknessProfile::uniform(ann, 1.0), eps, 2);
        double vol = 0.0;
        for (int e : c.layer_elements) vol += c.domain.element_volume(e);
        CHECK(std::abs(vol - eps * perimeter) <= 4.0 * eps * eps);
    }
}

TEST_CASE("integrate_boundary examples") {
    const auto d1 = build_interval_domain(8, GammaEnd::Right);
    const double three[] = {3.0};
    CHECK(integrate_boundary(d1, BoundaryLabel::Robin, three) == 3.0);

    const auto dr = build_radial_domain(32, 0.5, 1.0, 2, {});
    const double one[] = {1.0};
    CHECK(integrate_boundary(dr, BoundaryLabel::Robin, one) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-14));

    const auto m = unit_square_mesh(8, {"bottom"});
    const auto ds = build_planar_domain(m.vertices, m.triangles, m.faces);
    std::vector<double> ones(ds.faces_with_label(BoundaryLabel::Robin).size(), 1.0);
    CHECK(integrate_boundary(ds, BoundaryLabel::Robin, ones) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(integrate_boundary(ds, BoundaryLabel::Robin, std::vector<double>{1.0}), Error);
}

TEST_CASE("partition completeness") {
    const auto ms = unit_square_mesh(6, {"bottom", "left"});
    const auto ds = build_planar_domain(ms.vertices, ms.triangles, ms.faces);
    const double total = label_measure(ds, BoundaryLabel::Dirichlet) + label_measure(ds, BoundaryLabel::Robin);
    CHECK(total == doctest::Approx(4.0).epsilon(1e-15));

    const auto ma = annulus_mesh(3, 40, 0.5, 1.0, "inner");
    const auto da = build_planar_domain(ma.vertices, ma.triangles, ma.faces);
    // Independent perimeter: the annulus vertices on each circle, ordered by angle.
    std::vector<Point> inner, outer;
    for (const auto& v : ma.vertices) {
        const double r = v.norm();
        if (std::abs(r - 0.5) < 1e-12) inner.push_back(v);
        if (std::abs(r - 1.0) < 1e-12) outer.push_back(v);
    }
    auto by_angle = [](const Point& a, const Point& b) { return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x()); };
    std::sort(inner.begin(), inner.end(), by_angle);
    std::sort(outer.begin(), outer.end(), by_angle);
    const double expected = polygon_perimeter(inner) + polygon_perimeter(outer);
    const double got = label_measure(da, BoundaryLabel::Dirichlet) + label_measure(da, BoundaryLabel::Robin);
    CHECK(got == doctest::Approx(expected).epsilon(1e-14));
    CHECK(label_measure(da, BoundaryLabel::Robin) == doctest::Approx(polygon_perimeter(inner)).epsilon(1e-14));
}

TEST_CASE("boundary integrals are invariant under refinement") {
    // A face-constant integrand that only depends on the coarse face is
    // integrated identically on the refined square.
    auto bottom_integral = [](int n) {
        const auto m = unit_square_mesh(n, {"bottom"});
        const auto d = build_planar_domain(m.vertices, m.triangles, m.faces);
        std::vector<double> f;
        for (int id : d.faces_with_label(BoundaryLabel::Robin)) {
            const auto& face = d.boundary_faces()[id];
            const double mid = 0.5 * (d.nodes()[face.nodes[0]].x() + d.nodes()[face.nodes[1]].x());
            f.push_back(1.0 + std::floor(4.0 * mid));
        }
        return integrate_boundary(d, BoundaryLabel::Robin, f);
    };
    CHECK(bottom_integral(4) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(bottom_integral(8) == doctest::Approx(bottom_integral(4)).epsilon(1e-15));
    CHECK(bottom_integral(16) == doctest::Approx(bottom_integral(4)).epsilon(1e-15));

    // On the disk the geometry itself converges at second order.
    double prev_err = 0.0;
    for (int level = 2; level <= 5; ++level) {
        const auto m = disk_mesh(level, BoundaryLabel::Dirichlet);
        const auto d = build_planar_domain(m.vertices, m.triangles, m.faces);
        const double err = std::abs(label_measure(d, BoundaryLabel::Dirichlet) - 2.0 * std::numbers::pi);
        if (level > 2) CHECK(prev_err / err > 3.5);
        prev_err = err;
    }
}

TEST_CASE("mesh file round trip is lossless") {
    std::vector<DiscreteDomain> domains;
    domains.push_back(build_interval_domain(7, GammaEnd::Both));
    domains.push_back(build_radial_domain(9, 0.3, 1.0, 3, {BoundaryLabel::Robin, BoundaryLabel::Dirichlet}));
    const auto ma = annulus_mesh(2, 11, 0.5, 1.0, "outer");
    domains.push_back(build_planar_domain(ma.vertices, ma.triangles, ma.faces));
    const auto base = build_interval_domain(5, GammaEnd::Right);
    domains.push_back(attach_coating(base, ThicknessProfile::uniform(base, 1.0 / 3.0), 0.1, 3).domain);

    for (const auto& d : domains) {
        std::stringstream ss;
        write_mesh(ss, d);
        const auto text = ss.str();
        const auto back = read_mesh(ss);
        CHECK(back.mode() == d.mode());
        CHECK(back.space_dim() == d.space_dim());
        REQUIRE(back.num_nodes() == d.num_nodes());
        for (size_t i = 0; i < d.num_nodes(); ++i) CHECK((back.nodes()[i] == d.nodes()[i]));
        CHECK(back.elements() == d.elements());
        CHECK(back.regions() == d.regions());
        REQUIRE(back.boundary_faces().size() == d.boundary_faces().size());
        for (size_t f = 0; f < d.boundary_faces().size(); ++f) {
            CHECK(back.boundary_faces()[f].nodes == d.boundary_faces()[f].nodes);
            CHECK(back.boundary_faces()[f].label == d.boundary_faces()[f].label);
            CHECK(back.boundary_faces()[f].measure == d.boundary_faces()[f].measure);
        }
        std::stringstream again;
        write_mesh(again, back);
        CHECK(again.str() == text);
    }
}

TEST_CASE("mesh reader reports malformed input") {
    const char* bad[] = {
        "",
        "mesh cube 3\n",
        "mesh interval 1\nnodes 2\n0\n1\nelements 1\n0 5\nboundary 0\n",
        "mesh interval 1\nnodes 2\n0\nelements 1\n0 1\nboundary 2\n0 DIRICHLET\n1 ROBIN\n",
        "mesh interval 1\nnodes 3\n0\n0.5\n1\nelements 2\n0 1\n1 2\nboundary 2\n0 DIRICHLET\n2 SIDEWAYS\n",
    };
    for (const char* text : bad) {
        std::istringstream in(text);
        CHECK(code_of([&] { read_mesh(in); }) == ErrorCode::InvalidMesh);
    }
    std::istringstream ok("# comment\nmesh interval 1\nnodes 3\n0\n0.5\n1\n\nelements 2\n0 1\n1 2\nboundary 2\n0 DIRICHLET\n2 ROBIN\n");
    const auto d = read_mesh(ok);
    CHECK(d.num_nodes() == 3);
    CHECK(d.partition().robin_faces.size() == 1);
    CHECK(code_of([] { read_mesh_file("/nonexistent/mesh.txt"); }) == ErrorCode::IoError);
}

}  // TEST_SUITE
