#include "probin/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "probin/parallel.hpp"

namespace probin {

namespace {

bool strictly_decreasing(const std::vector<double>& v) {
    for (size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return true;
}

bool strictly_monotone(const std::vector<double>& v) {
    if (v.size() < 2) return true;
    bool up = true;
    bool down = true;
    for (size_t i = 1; i < v.size(); ++i) {
        up = up && v[i] > v[i - 1];
        down = down && v[i] < v[i - 1];
    }
    return up || down;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    return sxy / sxx;
}

double pow_deviation(double rho, double p) { return std::abs(std::pow(rho, -(p - 1.0)) - 1.0); }

}  // namespace

const std::vector<double>& LimitScanResult::column(const std::string& name) const {
    if (name == parameter_name) return parameter;
    if (name == observable_name) return observable;
    for (const auto& [key, values] : auxiliary) {
        if (key == name) return values;
    }
    throw Error(ErrorCode::InvalidParameter, "scan has no column " + name);
}

RobinField effective_h(const ThicknessProfile& rho, double p) {
    if (!(p > 1.0)) throw Error(ErrorCode::InvalidParameter, "p must lie in (1, inf)");
    RobinField h;
    h.representation = RobinField::Representation::PiecewiseConstant;
    h.values.reserve(rho.rho_values.size());
    for (double r : rho.rho_values) {
        if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidParameter, "thickness must be positive and finite");
        h.values.push_back(std::pow(r, -(p - 1.0)));
    }
    return h;
}

LimitScanResult coating_sweep(const DiscreteDomain& base, const ThicknessProfile& rho, double p,
                              const std::vector<double>& epsilons, const CoatingSweepSettings& settings) {
    if (epsilons.empty()) throw Error(ErrorCode::InvalidParameter, "coating sweep needs at least one epsilon");
    for (double e : epsilons) {
        if (!(e > 0.0)) throw Error(ErrorCode::InvalidParameter, "epsilon must be positive");
    }
    if (!strictly_decreasing(epsilons)) throw Error(ErrorCode::InvalidParameter, "epsilons must be strictly decreasing");
    rho.validate(base);

    const Eigenpair limit = principal_eigenpair(base, p, effective_h(rho, p), settings.solver);
    const size_t n = epsilons.size();
    std::vector<double> lambda(n);
    std::vector<double> mass(n);
    parallel_for(n, settings.threads, [&](size_t i) {
        const CoatedDomain coated = attach_coating(base, rho, epsilons[i], settings.layer_cells);
        const TwoPhaseResult r = two_phase_eigenpair(coated, p, settings.solver);
        lambda[i] = r.Lambda1;
        mass[i] = r.coating_mass;
    });

    LimitScanResult out;
    out.parameter_name = "epsilon";
    out.parameter = epsilons;
    out.observable_name = "Lambda1";
    out.observable = lambda;
    std::vector<double> gap(n);
    for (size_t i = 0; i < n; ++i) gap[i] = std::abs(lambda[i] - limit.lambda);
    out.auxiliary = {{"coating_mass", mass}, {"mu1", std::vector<double>(n, limit.lambda)}, {"abs_gap", gap}};

    const double floor = settings.tolerance_factor * settings.solver.tol_lambda * std::max(1.0, limit.lambda);
    std::vector<double> xs;
    std::vector<double> ys;
    for (size_t i = 0; i < n; ++i) {
        if (gap[i] >= floor) {
            xs.push_back(epsilons[i]);
            ys.push_back(gap[i]);
        }
    }
    out.rate_points = static_cast<int>(xs.size());
    if (xs.size() >= 2) out.rate = loglog_slope(xs, ys);
    return out;
}

LimitScanResult p_limit_scan_one(const std::vector<double>& rho_values, const std::vector<double>& p_grid) {
    if (rho_values.empty() || p_grid.empty()) throw Error(ErrorCode::InvalidParameter, "empty thickness list or p grid");
    for (double r : rho_values) {
        if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidParameter, "thickness must be positive and finite");
    }
    for (double p : p_grid) {
        if (!(p > 1.0 && p <= 2.0)) throw Error(ErrorCode::InvalidParameter, "p grid must lie in (1, 2]");
    }
    if (!strictly_decreasing(p_grid)) throw Error(ErrorCode::InvalidParameter, "p grid must decrease toward 1");

    LimitScanResult out;
    out.parameter_name = "p";
    out.parameter = p_grid;
    out.observable_name = "sup_deviation";
    for (double p : p_grid) {
        double sup = 0.0;
        for (double r : rho_values) sup = std::max(sup, pow_deviation(r, p));
        out.observable.push_back(sup);
    }
    return out;
}

std::string to_string(InfinityLimit kind) {
    switch (kind) {
        case InfinityLimit::Neumann: return "NEUMANN_LIMIT";
        case InfinityLimit::Unit: return "UNIT_LIMIT";
        case InfinityLimit::Dirichlet: return "DIRICHLET_LIMIT";
    }
    return "UNKNOWN";
}

InfinityLimit p_limit_classify_inf(double rho_value, const std::vector<double>& p_grid) {
    if (!(rho_value > 0.0) || !std::isfinite(rho_value)) throw Error(ErrorCode::InvalidParameter, "thickness must be positive");
    if (p_grid.size() < 2) throw Error(ErrorCode::InvalidParameter, "classification needs at least two p values");
    for (size_t i = 1; i < p_grid.size(); ++i) {
        if (!(p_grid[i] > p_grid[i - 1]) || !(p_grid[i - 1] > 1.0)) {
            throw Error(ErrorCode::InvalidParameter, "p grid must be increasing in (1, inf)");
        }
    }
    const double first = std::pow(rho_value, -(p_grid.front() - 1.0));
    const double last = std::pow(rho_value, -(p_grid.back() - 1.0));
    if (last < first) return InfinityLimit::Neumann;
    if (last > first) return InfinityLimit::Dirichlet;
    return InfinityLimit::Unit;
}

LimitScanResult p_continuity_scan(const DiscreteDomain& domain, const RobinField& h, const std::vector<double>& p_grid,
                                  const EigenSolveSettings& settings, int threads) {
    if (p_grid.empty()) throw Error(ErrorCode::InvalidParameter, "p grid is empty");
    for (double p : p_grid) {
        if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidParameter, "p must lie in (1, inf)");
    }
    if (!strictly_monotone(p_grid)) throw Error(ErrorCode::InvalidParameter, "p grid must be strictly monotone");

    const size_t n = p_grid.size();
    std::vector<double> lambda(n);
    parallel_for(n, threads, [&](size_t i) { lambda[i] = principal_eigenpair(domain, p_grid[i], h, settings).lambda; });

    LimitScanResult out;
    out.parameter_name = "p";
    out.parameter = p_grid;
    out.observable_name = "lambda1";
    out.observable = lambda;
    if (n < 2) return out;

    std::vector<double> jump(n - 1);
    std::vector<double> slope(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        jump[i] = std::abs(lambda[i + 1] - lambda[i]);
        slope[i] = jump[i] / std::abs(p_grid[i + 1] - p_grid[i]);
    }
    out.max_jump = *std::max_element(jump.begin(), jump.end());
    std::vector<double> ratio(n - 1, std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i + 1 < n; ++i) {
        double sum = 0.0;
        int count = 0;
        if (i > 0) {
            sum += slope[i - 1];
            ++count;
        }
        if (i + 2 < n) {
            sum += slope[i + 1];
            ++count;
        }
        if (count == 0) continue;
        const double predicted = sum / count * std::abs(p_grid[i + 1] - p_grid[i]);
        ratio[i] = predicted > 0.0 ? jump[i] / predicted : (jump[i] > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
        out.max_jump_ratio = std::max(out.max_jump_ratio.value_or(0.0), ratio[i]);
    }
    jump.push_back(std::numeric_limits<double>::quiet_NaN());
    ratio.push_back(std::numeric_limits<double>::quiet_NaN());
    out.auxiliary = {{"jump_to_next", jump}, {"jump_ratio", ratio}};
    return out;
}

double linf_rayleigh_eval(const DiscreteDomain& domain, const Vector& u) {
    if (static_cast<size_t>(u.size()) != domain.num_nodes()) {
        throw Error(ErrorCode::InvalidParameter, "nodal vector size does not match the mesh");
    }
    const double sup = u.cwiseAbs().maxCoeff();
    if (!(sup > 0.0)) throw Error(ErrorCode::DegenerateInput, "L-infinity quotient of the zero function");
    for (size_t i = 0; i < domain.num_nodes(); ++i) {
        if (domain.is_fixed(i) && std::abs(u[i]) > 1e-12 * sup) {
            throw Error(ErrorCode::ConstraintViolation, "u must vanish on the Dirichlet boundary");
        }
    }
    const Vector v = u / sup;
    double grad = 0.0;
    for (size_t e = 0; e < domain.num_elements(); ++e) {
        const auto nodes = domain.element_nodes(e);
        const auto& g = domain.shape_gradients(e);
        Point ge = Point::Zero();
        for (size_t a = 0; a < nodes.size(); ++a) ge += v[nodes[a]] * g[a];
        grad = std::max(grad, ge.norm());
    }
    double trace = 0.0;
    for (int f : domain.partition().robin_faces) {
        for (int node : domain.boundary_faces()[f].node_span()) trace = std::max(trace, std::abs(v[node]));
    }
    return std::max(grad, trace);
}

KneeScan linf_knee_scan(const DiscreteDomain& interval, const std::vector<double>& knees,
                        const std::vector<double>& heights) {
    if (interval.mode() != DimMode::Interval) throw Error(ErrorCode::InvalidParameter, "knee scan needs an interval mesh");
    KneeScan best;
    best.value = std::numeric_limits<double>::infinity();
    Vector u(static_cast<Eigen::Index>(interval.num_nodes()));
    for (double a : knees) {
        if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidParameter, "knee positions must lie in (0, 1)");
        for (double b : heights) {
            if (!(b > 0.0)) throw Error(ErrorCode::InvalidParameter, "knee heights must be positive");
            for (size_t i = 0; i < interval.num_nodes(); ++i) {
                const double x = interval.nodes()[i].x();
                u[static_cast<Eigen::Index>(i)] = x <= a ? b * x / a : b + (1.0 - b) * (x - a) / (1.0 - a);
            }
            const double value = linf_rayleigh_eval(interval, u);
            if (value < best.value) best = {value, a, b, 1.0};
        }
    }
    return best;
}

BVProfile BVProfile::step(double a) {
    if (!(a >= 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidParameter, "step location must lie in [0, 1)");
    if (a == 0.0) return {{0.0, 1.0}, {1.0}, {1.0}};
    return {{0.0, a, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
}

BVProfile BVProfile::linear(double slope) { return {{0.0, 1.0}, {0.0}, {slope}}; }

double bv_quotient_eval(const BVProfile& c) {
    const size_t segments = c.left_values.size();
    if (segments == 0 || c.right_values.size() != segments || c.breaks.size() != segments + 1) {
        throw Error(ErrorCode::InvalidParameter, "profile needs one left and right value per segment");
    }
    if (c.breaks.front() != 0.0 || c.breaks.back() != 1.0) {
        throw Error(ErrorCode::InvalidParameter, "profile must cover the unit interval");
    }
    for (size_t i = 0; i < segments; ++i) {
        if (!(c.breaks[i + 1] > c.breaks[i])) throw Error(ErrorCode::InvalidParameter, "breakpoints must increase");
    }
    double variation = 0.0;
    double mass = 0.0;
    for (size_t i = 0; i < segments; ++i) {
        const double a = c.left_values[i];
        const double b = c.right_values[i];
        const double len = c.breaks[i + 1] - c.breaks[i];
        variation += std::abs(b - a);
        if (i > 0) variation += std::abs(a - c.right_values[i - 1]);
        if (a * b >= 0.0) {
            mass += 0.5 * (std::abs(a) + std::abs(b)) * len;
        } else {
            mass += 0.5 * (a * a + b * b) / (std::abs(a) + std::abs(b)) * len;
        }
    }
    // A Dirichlet end adds the jump to the zero trace, a Robin end (h = 1) the
    // trace itself; both equal |u| there.
    const double boundary = std::abs(c.left_values.front()) + std::abs(c.right_values.back());
    if (!(mass > 0.0)) throw Error(ErrorCode::DegenerateInput, "BV quotient of a function with zero integral");
    return (variation + boundary) / mass;
}

std::pair<double, double> bv_step_minimum(const std::vector<double>& a_grid) {
    if (a_grid.empty()) throw Error(ErrorCode::InvalidParameter, "step grid is empty");
    std::pair<double, double> best{std::numeric_limits<double>::infinity(), 0.0};
    for (double a : a_grid) {
        const double q = bv_quotient_eval(BVProfile::step(a));
        if (q < best.first) best = {q, a};
    }
    return best;
}

}  // namespace probin
