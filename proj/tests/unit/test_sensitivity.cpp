#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "oracles.hpp"
#include "probin/coefficients.hpp"
#include "probin/eigensolver.hpp"
#include "probin/sensitivity.hpp"

using namespace probin;
using testing_support::tight_settings;

namespace {

Eigen::VectorXd flux_field(const Eigen::VectorXd& g, double p) {
    const double n = g.norm();
    if (n == 0.0) return Eigen::VectorXd::Zero(g.size());
    return std::pow(n, p - 2.0) * g;
}

Eigen::MatrixXd fd_jacobian(const Eigen::VectorXd& g, double p, double step) {
    Eigen::MatrixXd J(g.size(), g.size());
    for (int j = 0; j < g.size(); ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(g.size());
        e[j] = step;
        J.col(j) = (flux_field(g + e, p) - flux_field(g - e, p)) / (2.0 * step);
    }
    return J;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a probin::Error");
    return ErrorCode::IoError;
}

struct Setup {
    DiscreteDomain domain;
    double p;
    RobinField h;
    Eigenpair pair;
};

Setup interval_setup(double p, int n = 512) {
    auto d = build_interval_domain(n, GammaEnd::Right);
    auto h = RobinField::constant(d, 1.0);
    auto pair = principal_eigenpair(d, p, h, tight_settings());
    return {std::move(d), p, std::move(h), std::move(pair)};
}

}  // namespace

TEST_SUITE("sensitivity") {

TEST_CASE("linearized_matrix examples") {
    Eigen::VectorXd g(2);
    g << 0.3, -1.7;
    CHECK(linearized_matrix(g, 2.0).isApprox(Eigen::MatrixXd::Identity(2, 2), 0.0));
    Eigen::VectorXd e1(2);
    e1 << 1.0, 0.0;
    Eigen::MatrixXd expected(2, 2);
    expected << 2.0, 0.0, 0.0, 1.0;
    CHECK((linearized_matrix(e1, 3.0) - expected).norm() < 1e-15);
    CHECK((linearized_matrix(e1, 3.0) - fd_jacobian(e1, 3.0, 1e-6)).norm() < 1e-8);
    CHECK(linearized_matrix(Eigen::VectorXd::Zero(2), 4.0).norm() == 0.0);
    CHECK(code_of([&] { linearized_matrix(g, 1.5); }) == ErrorCode::UnsupportedExponent);
}

TEST_CASE("DF agrees with finite differences of F") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> pdist(2.0, 5.0);
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd g(2);
        do {
            g << gauss(rng), gauss(rng);
        } while (g.norm() < 0.1);
        const double p = pdist(rng);
        const auto exact = linearized_matrix(g, p);
        const auto fd = fd_jacobian(g, p, 1e-5 * g.norm());
        CHECK((exact - fd).norm() <= 1e-6 * exact.norm());
    }
}

TEST_CASE("scalar derivative identity") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> sd(-3.0, 3.0);
    std::uniform_real_distribution<double> pdist(1.2, 5.0);
    for (int i = 0; i < 100; ++i) {
        double s;
        do s = sd(rng);
        while (std::abs(s) < 0.05);
        const double t = sd(rng);
        const double p = pdist(rng);
        const double step = 1e-6 * std::abs(s);
        const double fd = (coeff::signed_pow(s + step * t, p - 1.0) - coeff::signed_pow(s - step * t, p - 1.0)) / (2.0 * step);
        const double exact = (p - 1.0) * std::pow(std::abs(s), p - 2.0) * t;
        CHECK(fd == doctest::Approx(exact).epsilon(1e-6).scale(1e-8));
    }
}

TEST_CASE("regularized_matrix examples") {
    const double delta = 0.01;
    Eigen::VectorXd g(2);
    g << 0.03 * std::cos(0.4), 0.03 * std::sin(0.4);  // |g| = 3δ
    for (double p : {2.0, 2.5, 3.0, 4.0}) CHECK((regularized_matrix(g, p, delta) - linearized_matrix(g, p)).norm() == 0.0);

    const auto at_zero = regularized_matrix(Eigen::VectorXd::Zero(2), 3.0, delta);
    CHECK((at_zero - delta * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-17);

    CHECK(code_of([&] { regularized_matrix(g, 3.0, 0.0); }) == ErrorCode::InvalidParameter);
    CHECK(code_of([&] { regularized_matrix(g, 3.0, -1.0); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("regularized eigenvalues stay in the ellipticity window") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> mag(0.0, 2.0);
    std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
    for (double p : {2.0, 2.5, 3.0, 4.5}) {
        const double delta = 0.05;
        const double gmax = 2.0;
        const auto [theta, Theta] = regularized_bounds(p, delta, gmax);
        CHECK(theta == doctest::Approx(std::min(1.0, p - 1.0) * std::pow(delta, p - 2.0)));
        for (int t = 0; t < 200; ++t) {
            const double r = t < 20 ? 0.1 * delta * t : mag(rng);
            const double a = ang(rng);
            Eigen::VectorXd g(2);
            g << r * std::cos(a), r * std::sin(a);
            const auto A = regularized_matrix(g, p, delta);
            CHECK((A - A.transpose()).norm() == 0.0);
            const auto ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues();
            CHECK(ev.minCoeff() >= theta * (1.0 - 1e-12));
            CHECK(ev.maxCoeff() <= Theta * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("coefficient fields on eigenpairs: symmetry, invisibility, ellipticity") {
    const auto m = unit_square_mesh(10, {"bottom", "right"});
    const auto planar = build_planar_domain(m.vertices, m.triangles, m.faces);
    std::vector<DiscreteDomain> domains;
    domains.push_back(build_interval_domain(256, GammaEnd::Right));
    domains.push_back(build_radial_domain(128, 0.5, 1.0, 2, {}));
    domains.push_back(planar);
    for (const auto& d : domains) {
        for (double p : {2.0, 3.0}) {
            const auto h = RobinField::constant(d, 1.0);
            const auto pair = principal_eigenpair(d, p, h);
            const double delta = default_sensitivity_delta(d, p, pair.u);
            const auto raw = raw_coefficients(d, p, pair.u);
            const auto reg = regularized_coefficients(d, p, pair.u, delta);
            CHECK(reg.kind == CoefficientKind::RegularizedADelta);
            CHECK(reg.delta == delta);
            PLaplacianForms forms(d, p, h);
            const auto grads = forms.gradients(pair.u);
            double gmax = 0.0;
            for (const auto& g : grads) gmax = std::max(gmax, g.norm());
            CHECK(delta == doctest::Approx(1e-3 * gmax));
            const auto [theta, Theta] = regularized_bounds(p, delta, gmax);
            for (size_t e = 0; e < d.num_elements(); ++e) {
                const Eigen::Matrix2d& A = reg.values[e];
                CHECK((A - A.transpose()).norm() <= 1e-14);
                CHECK((raw.values[e] - raw.values[e].transpose()).norm() <= 1e-14);
                if (grads[e].norm() >= 2.0 * delta) CHECK((A - raw.values[e]).norm() == 0.0);
                const int dim = d.grad_dim();
                const auto ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A.topLeftCorner(dim, dim)).eigenvalues();
                CHECK(ev.minCoeff() >= theta * (1.0 - 1e-12));
                CHECK(ev.maxCoeff() <= Theta * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("path matrix report") {
    const auto d = build_interval_domain(256, GammaEnd::Right);
    const auto a2 = principal_eigenpair(d, 2.0, RobinField::constant(d, 0.5));
    const auto b2 = principal_eigenpair(d, 2.0, RobinField::constant(d, 2.0));
    const auto r2 = path_matrix_report(d, a2, b2, 2.0);
    CHECK(r2.theta_min == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r2.theta_max == doctest::Approx(1.0).epsilon(1e-14));

    const auto a3 = principal_eigenpair(d, 3.0, RobinField::constant(d, 0.5));
    const auto b3 = principal_eigenpair(d, 3.0, RobinField::constant(d, 2.0));
    const auto same = path_matrix_report(d, a3, a3, 3.0);
    const auto raw = raw_coefficients(d, 3.0, a3.u);
    for (size_t e = 0; e < d.num_elements(); ++e) CHECK((same.path.values[e] - raw.values[e]).norm() <= 1e-12 * (1.0 + raw.values[e].norm()));

    const auto r3 = path_matrix_report(d, a3, b3, 3.0);
    CHECK(r3.theta_min > 0.0);
    CHECK(r3.theta_min >= std::min(1.0, 3.0 - 1.0) * r3.lower_bound_integral * (1.0 - 1e-3));
    CHECK(r3.path.kind == CoefficientKind::PathABar);

    const auto other = build_interval_domain(128, GammaEnd::Right);
    const auto c3 = principal_eigenpair(other, 3.0, RobinField::constant(other, 1.0));
    CHECK(code_of([&] { path_matrix_report(d, a3, c3, 3.0); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("lambda_derivative examples") {
    const auto s = interval_setup(2.0, 2048);
    CHECK(lambda_derivative(s.pair, RobinField::zero(s.domain), s.domain) == 0.0);
    const double k = oracle::robin_wavenumber();
    CHECK(std::abs(lambda_derivative(s.pair, RobinField::constant(s.domain, 1.0), s.domain) - oracle::sine_trace_square(k)) < 1e-2);

    const auto m = unit_square_mesh(8, {"bottom", "right"});
    const auto d = build_planar_domain(m.vertices, m.triangles, m.faces);
    const auto pair = principal_eigenpair(d, 3.0, RobinField::constant(d, 1.0));
    std::mt19937_64 rng(4);
    std::normal_distribution<double> gauss;
    RobinField x1, x2;
    for (size_t f = 0; f < d.partition().robin_faces.size(); ++f) {
        x1.values.push_back(gauss(rng));
        x2.values.push_back(gauss(rng));
    }
    const double a = 0.7, b = -2.3;
    const double lhs = lambda_derivative(pair, a * x1 + b * x2, d);
    const double rhs = a * lambda_derivative(pair, x1, d) + b * lambda_derivative(pair, x2, d);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("saddle solve reproduces the boundary formula and finite differences") {
    struct Case {
        DiscreteDomain d;
        double p;
    };
    std::vector<Case> cases;
    cases.push_back({build_interval_domain(1024, GammaEnd::Right), 2.0});
    cases.push_back({build_interval_domain(1024, GammaEnd::Right), 3.0});
    cases.push_back({build_radial_domain(512, 0.5, 1.0, 2, {}), 2.0});
    for (const auto& c : cases) {
        CAPTURE(c.p);
        const auto h = RobinField::constant(c.d, 1.0);
        const auto xi = RobinField::constant(c.d, 1.0);
        const auto pair = principal_eigenpair(c.d, c.p, h, tight_settings());
        const auto lin = solve_linearized(c.d, c.p, h, pair, xi);
        CHECK(std::abs(lin.lambda_prime - lambda_derivative(pair, xi, c.d)) <= 1e-10);
        CHECK(lin.constraint_residual <= 1e-10);
        for (size_t i = 0; i < c.d.num_nodes(); ++i) {
            if (c.d.is_fixed(i)) CHECK(lin.u_prime[i] == 0.0);
        }
        const double t = 1e-4;
        const double lp = principal_eigenpair(c.d, c.p, h + t * xi, tight_settings()).lambda;
        const double lm = principal_eigenpair(c.d, c.p, h + (-t) * xi, tight_settings()).lambda;
        const double fd = (lp - lm) / (2.0 * t);
        CHECK(std::abs(fd - lin.lambda_prime) <= 1e-4 * std::abs(fd));
    }
}

TEST_CASE("u' matches the finite-difference quotient for p = 2") {
    const auto s = interval_setup(2.0, 1024);
    const auto xi = RobinField::constant(s.domain, 1.0);
    const auto lin = solve_linearized(s.domain, 2.0, s.h, s.pair, xi);
    std::vector<double> errs;
    for (double t : {1e-2, 5e-3}) {
        const auto up = principal_eigenpair(s.domain, 2.0, s.h + t * xi, tight_settings());
        const auto um = principal_eigenpair(s.domain, 2.0, s.h + (-t) * xi, tight_settings());
        errs.push_back(((up.u - um.u) / (2.0 * t) - lin.u_prime).lpNorm<Eigen::Infinity>());
    }
    // Quadratic in t until the solver tolerance takes over.
    CHECK(errs[0] < 1e-3);
    CHECK(errs[0] / errs[1] > 3.0);
}

TEST_CASE("Frechet remainder slope") {
    for (double p : {2.0, 3.0}) {
        const auto s = interval_setup(p, 512);
        const auto xi = RobinField::constant(s.domain, 1.0);
        const double lprime = lambda_derivative(s.pair, xi, s.domain);
        std::vector<double> lx, ly;
        for (double t : {1e-2, 1e-3, 1e-4, 1e-5}) {
            const double lt = principal_eigenpair(s.domain, p, s.h + t * xi, tight_settings()).lambda;
            lx.push_back(std::log(t));
            ly.push_back(std::log(std::abs(lt - s.pair.lambda - t * lprime)));
        }
        const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4.0;
        const double my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4.0;
        double sxy = 0.0, sxx = 0.0;
        for (int i = 0; i < 4; ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        CHECK(sxy / sxx >= (p == 2.0 ? 1.9 : 1.5));
    }
}

TEST_CASE("sensitivity delta does not reach the boundary data") {
    const auto m = unit_square_mesh(12, {"bottom", "right"});
    const auto d = build_planar_domain(m.vertices, m.triangles, m.faces);
    const auto h = RobinField::constant(d, 1.0);
    const auto pair = principal_eigenpair(d, 3.0, h, tight_settings());
    RobinField xi;
    for (size_t f = 0; f < d.partition().robin_faces.size(); ++f) xi.values.push_back(1.0 + 0.5 * std::sin(double(f)));
    const double delta = default_sensitivity_delta(d, 3.0, pair.u);
    const auto a = solve_linearized(d, 3.0, h, pair, xi, delta);
    const auto b = solve_linearized(d, 3.0, h, pair, xi, delta / 10.0);
    CHECK(a.delta == delta);
    CHECK(std::abs(a.lambda_prime - b.lambda_prime) < 1e-8);
    const auto qa = linearized_boundary_flux(d, 3.0, pair, a, BoundaryLabel::Dirichlet);
    const auto qb = linearized_boundary_flux(d, 3.0, pair, b, BoundaryLabel::Dirichlet);
    REQUIRE(qa.size() == qb.size());
    for (size_t i = 0; i < qa.size(); ++i) {
        if (std::isnan(qa[i])) continue;
        CHECK(std::abs(qa[i] - qb[i]) < 1e-8);
    }
}

TEST_CASE("linearization is restricted to p >= 2") {
    const auto d = build_interval_domain(64, GammaEnd::Right);
    const auto h = RobinField::constant(d, 1.0);
    const auto pair = principal_eigenpair(d, 1.5, h);
    CHECK(code_of([&] { solve_linearized(d, 1.5, h, pair, h); }) == ErrorCode::UnsupportedExponent);
}

}  // TEST_SUITE
