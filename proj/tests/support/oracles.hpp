#pragma once

// Independent reference values for the 1D test problems. Nothing here calls
// into the library: roots come from bisection, eigenvalues of the nonlinear
// problem from an RK4 shooting method.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace oracle {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    double flo = f(lo);
    if (flo * f(hi) > 0.0) throw std::runtime_error("bisect: no sign change");
    for (int i = 0; i < iters && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// First positive root of tan k = -k h (Robin coefficient h at x = 1, Dirichlet at 0),
/// written as sin k + (k/h) cos k = 0 on (π/2, π).
inline double robin_wavenumber(double h = 1.0) {
    return bisect([h](double k) { return h * std::sin(k) + k * std::cos(k); }, std::numbers::pi / 2, std::numbers::pi);
}

inline double robin_lambda_p2(double h = 1.0) {
    const double k = robin_wavenumber(h);
    return k * k;
}

/// ∫_0^1 sin²(kx) dx
inline double sine_square_integral(double k) { return 0.5 - std::sin(2.0 * k) / (4.0 * k); }

/// u(1)² for u = sin(kx) normalized in L²(0,1).
inline double sine_trace_square(double k) { return std::sin(k) * std::sin(k) / sine_square_integral(k); }

/// Outward flux at x = 0 of the normalized sine profile, −u'(0).
inline double sine_flux_at_zero(double k) { return -k / std::sqrt(sine_square_integral(k)); }

/// π_p-based Dirichlet eigenvalue on (0,1): (p−1)(2π / (p sin(π/p)))^p.
inline double dirichlet_lambda(double p) {
    const double pi = std::numbers::pi;
    return (p - 1.0) * std::pow(2.0 * pi / (p * std::sin(pi / p)), p);
}

/// RK4 integration of (u, w = |u'|^{p-2}u') for -(|u'|^{p-2}u')' = λ|u|^{p-2}u
/// on (0,1) with u(0) = 0, u'(0) = 1. Returns the boundary mismatch at x = 1:
/// u(1) for a Dirichlet end, w(1) + h|u(1)|^{p-2}u(1) for a Robin end.
inline double shooting_mismatch(double lambda, double p, bool robin, double h, int steps) {
    auto phi = [](double s, double q) { return s == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s), q), s); };
    const double q_inv = 1.0 / (p - 1.0);
    auto rhs = [&](double u, double w, double& du, double& dw) {
        du = phi(w, q_inv);
        dw = -lambda * phi(u, p - 1.0);
    };
    double u = 0.0;
    double w = 1.0;
    const double dx = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
        double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
        rhs(u, w, k1u, k1w);
        rhs(u + 0.5 * dx * k1u, w + 0.5 * dx * k1w, k2u, k2w);
        rhs(u + 0.5 * dx * k2u, w + 0.5 * dx * k2w, k3u, k3w);
        rhs(u + dx * k3u, w + dx * k3w, k4u, k4w);
        u += dx / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        w += dx / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    }
    return robin ? w + h * phi(u, p - 1.0) : u;
}

/// Principal eigenvalue of the 1D p-Laplacian by shooting plus bisection in λ.
/// The mismatch is positive below λ₁ and changes sign at λ₁; the bracket is
/// grown from a small λ until that happens.
inline double shooting_lambda(double p, bool robin, double h = 0.0, int steps = 40000) {
    auto f = [&](double lam) { return shooting_mismatch(lam, p, robin, h, steps); };
    double lo = 1e-3;
    double hi = 1.0;
    while (f(hi) > 0.0) {
        lo = hi;
        hi *= 1.5;
        if (hi > 1e6) throw std::runtime_error("shooting: no bracket");
    }
    return bisect(f, lo, hi, 80);
}

/// Principal eigenvalue of the linear two-phase problem on (0, 1 + ερ):
/// -(σu')' = λu with σ = 1 on (0,1), σ = ε on the coating, u = 0 at both ends.
/// Transfer across x = 1 keeps u and σu' continuous.
inline double two_phase_lambda_p2(double epsilon, double rho) {
    const double thickness = epsilon * rho;
    auto f = [&](double lam) {
        const double k = std::sqrt(lam);
        const double kappa = std::sqrt(lam / epsilon);
        const double u1 = std::sin(k);
        const double slope = k * std::cos(k) / epsilon;  // u'(1+) from εu'(1+) = u'(1-)
        return u1 * std::cos(kappa * thickness) + slope / kappa * std::sin(kappa * thickness);
    };
    // Below π² the end value changes sign once: higher modes need κ·ερ ≥ π,
    // i.e. λ ≥ π²/(ερ²), far above π² for thin coatings.
    return bisect(f, 1e-6, std::numbers::pi * std::numbers::pi);
}

}  // namespace oracle
