#include "probin/coefficients.hpp"

#include <cmath>

namespace probin::coeff {

namespace {

// Standard C^∞ transition from 0 (x ≤ 0) to 1 (x ≥ 1); its slope peaks at 2.
double transition(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

double transition_derivative(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    const double da = a / (x * x);
    const double db = -b / ((1.0 - x) * (1.0 - x));
    return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

}  // namespace

double cutoff(double t, double delta) { return 1.0 - transition((t - delta) / delta); }

double cutoff_derivative(double t, double delta) { return -transition_derivative((t - delta) / delta) / delta; }

double localized_magnitude(const Point& g, double delta) {
    const double n = g.norm();
    const double c = cutoff(n, delta);
    if (c == 0.0) return n;
    return std::sqrt(n * n + delta * delta * c);
}

Eigen::Matrix2d matrix_with_magnitude(const Point& g, double s, double p, int dim) {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    if (p == 2.0) {
        a.topLeftCorner(dim, dim).setIdentity();
        return a;
    }
    if (s == 0.0) return a;
    const double sp2 = std::pow(s, p - 2.0);
    const double sp4 = sp2 / (s * s);
    a.topLeftCorner(dim, dim).setIdentity();
    a *= sp2;
    const Eigen::Vector2d gv = dim == 1 ? Eigen::Vector2d(g.x(), 0.0) : Eigen::Vector2d(g);
    // Scale the products g_i g_j so that the result is exactly symmetric.
    const double c = (p - 2.0) * sp4;
    a(0, 0) += c * (gv[0] * gv[0]);
    a(1, 1) += c * (gv[1] * gv[1]);
    a(0, 1) += c * (gv[0] * gv[1]);
    a(1, 0) = a(0, 1);
    return a;
}

Eigen::Matrix2d raw(const Point& g, double p, int dim) {
    const Point gd = dim == 1 ? Point(g.x(), 0.0) : g;
    return matrix_with_magnitude(gd, gd.norm(), p, dim);
}

Eigen::Matrix2d localized(const Point& g, double p, double delta, int dim) {
    const Point gd = dim == 1 ? Point(g.x(), 0.0) : g;
    return matrix_with_magnitude(gd, localized_magnitude(gd, delta), p, dim);
}

Eigen::Matrix2d always_regularized(const Point& g, double p, double delta, int dim) {
    const Point gd = dim == 1 ? Point(g.x(), 0.0) : g;
    return matrix_with_magnitude(gd, std::sqrt(gd.squaredNorm() + delta * delta), p, dim);
}

}  // namespace probin::coeff
