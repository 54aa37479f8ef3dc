#include "probin/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "probin/parallel.hpp"
#include "probin/sensitivity.hpp"

namespace probin {

namespace {

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

void require_same_layout(const Measurement& a, const Measurement& b) {
    if (a.face_ids != b.face_ids || a.flux_trace.size() != b.flux_trace.size()) {
        throw Error(ErrorCode::InvalidParameter, "measurements live on different Dirichlet face sets");
    }
    if (a.p != b.p) throw Error(ErrorCode::InvalidParameter, "measurements use different exponents");
}

/// γ-faces ordered along connected chains, each chain walked from an open end
/// (or its lowest face index when closed).
std::vector<int> chain_order(const DiscreteDomain& domain) {
    const auto& robin = domain.partition().robin_faces;
    const auto& faces = domain.boundary_faces();
    const size_t m = robin.size();
    std::vector<int> order;
    order.reserve(m);
    if (domain.mode() != DimMode::Planar) {
        std::vector<size_t> idx(m);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            return domain.nodes()[faces[robin[a]].nodes[0]].x() < domain.nodes()[faces[robin[b]].nodes[0]].x();
        });
        for (size_t i : idx) order.push_back(static_cast<int>(i));
        return order;
    }

    std::map<int, std::vector<int>> by_node;
    for (size_t k = 0; k < m; ++k) {
        for (int v : faces[robin[k]].node_span()) by_node[v].push_back(static_cast<int>(k));
    }
    std::vector<bool> seen(m, false);
    auto walk = [&](int start, int entry_node) {
        int cur = start;
        int from = entry_node;
        while (cur >= 0 && !seen[cur]) {
            seen[cur] = true;
            order.push_back(cur);
            const auto& f = faces[robin[cur]];
            const int exit = f.nodes[0] == from ? f.nodes[1] : f.nodes[0];
            int next = -1;
            for (int g : by_node[exit]) {
                if (g != cur && !seen[g]) next = g;
            }
            from = exit;
            cur = next;
        }
    };
    // Open chains first, starting at faces that own a degree-one node.
    for (size_t k = 0; k < m; ++k) {
        if (seen[k]) continue;
        for (int v : faces[robin[k]].node_span()) {
            if (by_node[v].size() == 1) {
                walk(static_cast<int>(k), v);
                break;
            }
        }
    }
    for (size_t k = 0; k < m; ++k) {
        if (!seen[k]) walk(static_cast<int>(k), faces[robin[k]].nodes[0]);
    }
    return order;
}

/// Clamped uniform B-spline basis of the given degree with k functions at s.
std::vector<double> bspline_values(int k, int degree, double s) {
    const int n_knots = k + degree + 1;
    std::vector<double> t(static_cast<size_t>(n_knots));
    const int interior = k - degree - 1;
    for (int i = 0; i < n_knots; ++i) {
        if (i <= degree) {
            t[i] = 0.0;
        } else if (i >= k) {
            t[i] = 1.0;
        } else {
            t[i] = static_cast<double>(i - degree) / (interior + 1);
        }
    }
    s = std::clamp(s, 0.0, 1.0);
    std::vector<double> b(static_cast<size_t>(n_knots - 1), 0.0);
    for (int i = 0; i < n_knots - 1; ++i) {
        if (t[i] <= s && s < t[i + 1]) b[i] = 1.0;
    }
    if (s >= 1.0) b[k - 1] = 1.0;
    for (int d = 1; d <= degree; ++d) {
        for (int i = 0; i + d < n_knots - 1; ++i) {
            double v = 0.0;
            const double l = t[i + d] - t[i];
            const double r = t[i + d + 1] - t[i + 1];
            if (l > 0.0) v += (s - t[i]) / l * b[i];
            if (r > 0.0) v += (t[i + d + 1] - s) / r * b[i + 1];
            b[i] = v;
        }
    }
    b.resize(static_cast<size_t>(k));
    return b;
}

Eigen::MatrixXd solve_columns(const DiscreteDomain& domain, double p, const RobinField& h0, const Eigenpair& pair,
                              const Measurement& base, const std::vector<RobinField>& dirs, double delta,
                              int threads) {
    const auto gamma_d = domain.faces_with_label(BoundaryLabel::Dirichlet);
    std::map<int, size_t> position;
    for (size_t i = 0; i < gamma_d.size(); ++i) position[gamma_d[i]] = i;

    Eigen::MatrixXd jac(1 + static_cast<Eigen::Index>(base.face_ids.size()), static_cast<Eigen::Index>(dirs.size()));
    parallel_for(dirs.size(), threads, [&](size_t j) {
        const auto lin = solve_linearized(domain, p, h0, pair, dirs[j], delta);
        const auto dq = linearized_boundary_flux(domain, p, pair, lin, BoundaryLabel::Dirichlet);
        const auto col = static_cast<Eigen::Index>(j);
        jac(0, col) = lambda_derivative(pair, dirs[j], domain);
        for (size_t r = 0; r < base.face_ids.size(); ++r) {
            jac(static_cast<Eigen::Index>(r + 1), col) = dq[position.at(base.face_ids[r])];
        }
    });
    return jac;
}

struct Evaluation {
    Eigenpair pair;
    Measurement measurement;
    double misfit = 0.0;
};

}  // namespace

Vector Measurement::as_vector() const {
    Vector v(1 + static_cast<Eigen::Index>(flux_trace.size()));
    v[0] = lambda;
    for (size_t i = 0; i < flux_trace.size(); ++i) v[static_cast<Eigen::Index>(i + 1)] = flux_trace[i];
    return v;
}

Vector Measurement::weights() const {
    Vector w(1 + static_cast<Eigen::Index>(face_measure.size()));
    w[0] = 1.0;
    for (size_t i = 0; i < face_measure.size(); ++i) w[static_cast<Eigen::Index>(i + 1)] = face_measure[i];
    return w;
}

Measurement measure_eigenpair(const DiscreteDomain& domain, const Eigenpair& pair) {
    const auto faces = domain.faces_with_label(BoundaryLabel::Dirichlet);
    const auto flux = boundary_flux(domain, pair.p, pair, BoundaryLabel::Dirichlet);
    Measurement m;
    m.lambda = pair.lambda;
    m.p = pair.p;
    for (size_t i = 0; i < faces.size(); ++i) {
        if (!std::isfinite(flux[i])) continue;
        m.face_ids.push_back(faces[i]);
        m.flux_trace.push_back(flux[i]);
        m.face_measure.push_back(domain.boundary_faces()[faces[i]].measure);
    }
    return m;
}

Measurement forward_measure(const DiscreteDomain& domain, double p, const RobinField& h,
                            const EigenSolveSettings& settings) {
    return measure_eigenpair(domain, principal_eigenpair(domain, p, h, settings));
}

double measurement_distance(const Measurement& m1, const Measurement& m2) {
    require_same_layout(m1, m2);
    const double q = m1.p / (m1.p - 1.0);
    double sum = 0.0;
    for (size_t i = 0; i < m1.flux_trace.size(); ++i) {
        sum += m1.face_measure[i] * std::pow(std::abs(m1.flux_trace[i] - m2.flux_trace[i]), q);
    }
    return std::abs(m1.lambda - m2.lambda) + std::pow(sum, 1.0 / q);
}

RobinParameterization::RobinParameterization(const DiscreteDomain& domain, Basis basis, int k, int degree,
                                             double h_min)
    : domain_(&domain), basis_(basis), degree_(degree), h_min_(h_min) {
    const auto& robin = domain.partition().robin_faces;
    if (robin.empty()) throw Error(ErrorCode::InvalidParameter, "domain has no Robin boundary to parameterize");
    if (k < 1) throw Error(ErrorCode::InvalidParameter, "basis size must be positive");
    if (!(h_min >= 0.0) || !std::isfinite(h_min)) throw Error(ErrorCode::InvalidParameter, "h_min must be nonnegative");

    const size_t m = robin.size();
    measure_.resize(m);
    for (size_t i = 0; i < m; ++i) measure_[i] = domain.boundary_faces()[robin[i]].measure;
    const double total = std::accumulate(measure_.begin(), measure_.end(), 0.0);
    s_.assign(m, 0.0);
    double acc = 0.0;
    for (int i : chain_order(domain)) {
        s_[i] = (acc + 0.5 * measure_[i]) / total;
        acc += measure_[i];
    }

    phi_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), k);
    for (size_t i = 0; i < m; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        if (basis == Basis::PiecewiseConstant) {
            phi_(row, std::min(k - 1, static_cast<int>(std::floor(s_[i] * k)))) = 1.0;
        } else {
            const auto b = bspline_values(k, degree, s_[i]);
            for (int j = 0; j < k; ++j) phi_(row, j) = b[j];
        }
    }
}

RobinParameterization RobinParameterization::piecewise_constant(const DiscreteDomain& domain, int k, double h_min) {
    return RobinParameterization(domain, Basis::PiecewiseConstant, k, 0, h_min);
}

RobinParameterization RobinParameterization::bspline(const DiscreteDomain& domain, int k, int degree, double h_min) {
    if (degree < 0 || k < degree + 1) {
        throw Error(ErrorCode::InvalidParameter, "B-spline basis needs degree >= 0 and k >= degree + 1");
    }
    return RobinParameterization(domain, Basis::BSpline, k, degree, h_min);
}

RobinField RobinParameterization::synthesize(const Vector& c) const {
    if (c.size() != phi_.cols()) throw Error(ErrorCode::InvalidParameter, "coefficient vector has the wrong size");
    const Vector h = phi_ * c;
    return RobinField{std::vector<double>(h.data(), h.data() + h.size()), RobinField::Representation::PiecewiseConstant};
}

RobinField RobinParameterization::basis_function(int j) const {
    if (j < 0 || j >= phi_.cols()) throw Error(ErrorCode::InvalidParameter, "basis index out of range");
    const Vector col = phi_.col(j);
    return RobinField{std::vector<double>(col.data(), col.data() + col.size()),
                      RobinField::Representation::PiecewiseConstant};
}

Vector RobinParameterization::project(const Vector& c) const { return c.cwiseMax(h_min_); }

bool RobinParameterization::admissible(const Vector& c) const {
    const Vector h = phi_ * c;
    return h.allFinite() && (h.array() >= h_min_).all();
}

Vector RobinParameterization::fit(const RobinField& h) const {
    const auto values = h.face_quadrature_values(*domain_);
    const int nq = domain_->face_quad_points();
    const auto& robin = domain_->partition().robin_faces;
    Vector target(static_cast<Eigen::Index>(robin.size()));
    for (size_t i = 0; i < robin.size(); ++i) {
        const auto w = domain_->face_quad_weights(robin[i]);
        double num = 0.0;
        for (int q = 0; q < nq; ++q) num += w[q] * values[i * nq + q];
        target[static_cast<Eigen::Index>(i)] = num / measure_[i];
    }
    Vector sw(static_cast<Eigen::Index>(measure_.size()));
    for (size_t i = 0; i < measure_.size(); ++i) sw[static_cast<Eigen::Index>(i)] = std::sqrt(measure_[i]);
    const Eigen::MatrixXd a = sw.asDiagonal() * phi_;
    return a.colPivHouseholderQr().solve(sw.cwiseProduct(target));
}

double robin_l2_distance(const DiscreteDomain& domain, const RobinField& h1, const RobinField& h2) {
    const auto a = h1.face_quadrature_values(domain);
    const auto b = h2.face_quadrature_values(domain);
    const auto& robin = domain.partition().robin_faces;
    const int nq = domain.face_quad_points();
    double sum = 0.0;
    for (size_t i = 0; i < robin.size(); ++i) {
        const auto w = domain.face_quad_weights(robin[i]);
        for (int q = 0; q < nq; ++q) {
            const double d = a[i * nq + q] - b[i * nq + q];
            sum += w[q] * d * d;
        }
    }
    return std::sqrt(sum);
}

double robin_c1_norm(const RobinParameterization& param, const RobinField& h) {
    if (h.representation != RobinField::Representation::PiecewiseConstant ||
        h.values.size() != param.face_parameter().size()) {
        throw Error(ErrorCode::InvalidParameter, "C1 norm needs one value per Robin face");
    }
    const auto& s = param.face_parameter();
    std::vector<size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return s[a] < s[b]; });
    double sup = 0.0;
    for (double v : h.values) sup = std::max(sup, std::abs(v));
    double lip = 0.0;
    for (size_t i = 1; i < idx.size(); ++i) {
        const double ds = s[idx[i]] - s[idx[i - 1]];
        if (ds > 0.0) lip = std::max(lip, std::abs(h.values[idx[i]] - h.values[idx[i - 1]]) / ds);
    }
    return sup + lip;
}

Eigen::MatrixXd jacobian_at(const DiscreteDomain& domain, double p, const RobinField& h0, const Eigenpair& pair,
                            const Measurement& base, const std::vector<RobinField>& directions, double delta,
                            int threads) {
    return solve_columns(domain, p, h0, pair, base, directions, delta, threads);
}

JacobianResult jacobian(const DiscreteDomain& domain, double p, const RobinField& h0,
                        const RobinParameterization& param, const EigenSolveSettings& settings, double delta,
                        int threads) {
    if (!(p >= 2.0)) throw Error(ErrorCode::UnsupportedExponent, "the Jacobian is only available for p >= 2");
    JacobianResult out;
    out.pair = principal_eigenpair(domain, p, h0, settings);
    out.base = measure_eigenpair(domain, out.pair);
    std::vector<RobinField> dirs;
    for (int j = 0; j < param.size(); ++j) dirs.push_back(param.basis_function(j));
    out.matrix = solve_columns(domain, p, h0, out.pair, out.base, dirs, delta, threads);
    return out;
}

Measurement NoiseModel::apply(const Measurement& clean, std::uint64_t seed) const {
    if (!(flux_level >= 0.0) || !(lambda_level >= 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "noise levels must be nonnegative");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Measurement noisy = clean;
    const double z = normal(rng);
    noisy.lambda += lambda_level * std::abs(clean.lambda) * z;
    for (auto& q : noisy.flux_trace) q += flux_level * std::abs(q) * normal(rng);
    return noisy;
}

double NoiseModel::expected_misfit(const Measurement& clean) const {
    double sum = std::pow(lambda_level * clean.lambda, 2);
    for (size_t i = 0; i < clean.flux_trace.size(); ++i) {
        sum += clean.face_measure[i] * std::pow(flux_level * clean.flux_trace[i], 2);
    }
    return std::sqrt(sum);
}

double weighted_misfit(const Measurement& model, const Measurement& data) {
    require_same_layout(model, data);
    const Vector r = data.as_vector() - model.as_vector();
    return std::sqrt(r.cwiseProduct(data.weights()).dot(r));
}

ReconstructionResult gauss_newton_reconstruct(const DiscreteDomain& domain, double p, const Measurement& data,
                                              const RobinParameterization& param, const Vector& c_init,
                                              double reg_weight, const GaussNewtonSettings& settings) {
    if (!(p >= 2.0)) throw Error(ErrorCode::UnsupportedExponent, "reconstruction needs p >= 2");
    if (!(reg_weight >= 0.0)) throw Error(ErrorCode::InvalidParameter, "regularization weight must be nonnegative");
    if (c_init.size() != param.size()) throw Error(ErrorCode::InvalidParameter, "initial coefficients have the wrong size");
    if (!param.admissible(c_init)) throw Error(ErrorCode::InvalidParameter, "initial Robin coefficient is below h_min");

    auto evaluate = [&](const Vector& c) {
        Evaluation ev;
        ev.pair = principal_eigenpair(domain, p, param.synthesize(c), settings.solver);
        ev.measurement = measure_eigenpair(domain, ev.pair);
        ev.misfit = weighted_misfit(ev.measurement, data);
        return ev;
    };
    std::vector<RobinField> dirs;
    for (int j = 0; j < param.size(); ++j) dirs.push_back(param.basis_function(j));

    const Vector w = data.weights();
    const Vector d = data.as_vector();
    const double data_norm = std::sqrt(d.cwiseProduct(w).dot(d));

    ReconstructionResult res;
    res.regularization_weight = reg_weight;
    Vector c = c_init;
    Evaluation cur = evaluate(c);
    res.residual_history.push_back(cur.misfit);
    res.step_norms.push_back(0.0);
    res.coefficient_history.push_back(c);
    auto snapshot = [&] {
        res.c_hat = c;
        res.h_hat = param.synthesize(c);
        return res;
    };

    for (int it = 0; it < settings.max_iters; ++it) {
        if (cur.misfit <= settings.misfit_tol * data_norm) {
            res.converged = true;
            break;
        }
        const Eigen::MatrixXd jac = solve_columns(domain, p, param.synthesize(c), cur.pair, cur.measurement, dirs,
                                                  settings.delta, settings.threads);
        const Vector r = d - cur.measurement.as_vector();
        const Eigen::MatrixXd jtw = jac.transpose() * w.asDiagonal();
        Eigen::MatrixXd normal = jtw * jac;
        normal.diagonal().array() += reg_weight;
        const Vector g = jtw * r;
        const Vector step = normal.ldlt().solve(g);
        if (!step.allFinite()) throw NoDescentDirectionError("Gauss-Newton normal equations are singular", snapshot());
        if (step.norm() <= settings.step_tol * std::max(1.0, c.norm())) {
            res.converged = true;
            break;
        }

        double alpha = 1.0;
        bool accepted = false;
        bool stalled = false;
        Vector trial_c;
        Evaluation trial;
        for (int b = 0; b <= settings.max_backtracks; ++b, alpha *= settings.backtrack) {
            trial_c = param.project(c + alpha * step);
            const Vector s = trial_c - c;
            if (s.norm() == 0.0) {
                stalled = true;
                break;
            }
            trial = evaluate(trial_c);
            const double decrease = 0.5 * (cur.misfit * cur.misfit - trial.misfit * trial.misfit);
            if (decrease >= settings.armijo * g.dot(s) && trial.misfit <= cur.misfit) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // A predicted decrease at the level of solver noise means the misfit has bottomed out.
            const double predicted = g.dot(step);
            if (stalled || predicted <= 1e-6 * cur.misfit * cur.misfit) {
                res.converged = true;
                break;
            }
            throw NoDescentDirectionError("line search found no decrease of the data misfit", snapshot());
        }
        const double reduction = (cur.misfit - trial.misfit) / std::max(cur.misfit, std::numeric_limits<double>::min());
        res.step_norms.push_back((trial_c - c).norm());
        c = trial_c;
        cur = std::move(trial);
        res.residual_history.push_back(cur.misfit);
        res.coefficient_history.push_back(c);
        ++res.iterations;
        if (reduction < settings.stagnation_tol) {
            res.converged = true;
            break;
        }
    }
    return snapshot();
}

ReconstructionResult discrepancy_reconstruct(const DiscreteDomain& domain, double p, const Measurement& data,
                                             const RobinParameterization& param, const Vector& c_init,
                                             std::vector<double> reg_weights, double noise_level,
                                             const GaussNewtonSettings& settings) {
    if (reg_weights.empty()) throw Error(ErrorCode::InvalidParameter, "discrepancy sweep needs at least one weight");
    std::sort(reg_weights.begin(), reg_weights.end(), std::greater<>());
    ReconstructionResult last;
    for (double weight : reg_weights) {
        try {
            last = gauss_newton_reconstruct(domain, p, data, param, c_init, weight, settings);
        } catch (const NoDescentDirectionError& e) {
            last = e.best();
        }
        if (last.residual_history.back() <= 1.1 * noise_level) return last;
    }
    return last;
}

StabilityProbeResult stability_probe(const DiscreteDomain& domain, double p, const RobinField& h0,
                                     const RobinParameterization& param, const std::vector<double>& radii, double M,
                                     const StabilityProbeSettings& settings) {
    if (!(M > 0.0)) throw Error(ErrorCode::InvalidParameter, "C1 ball radius M must be positive");
    for (double r : radii) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidParameter, "perturbation radii must be nonnegative");
    }
    h0.validate(domain);
    if (h0.representation != RobinField::Representation::PiecewiseConstant) {
        throw Error(ErrorCode::InvalidParameter, "stability probe needs a piecewise-constant base field");
    }

    const size_t n = radii.size();
    std::vector<RobinField> fields(n);
    std::vector<bool> usable(n, false);
    for (size_t j = 0; j < n; ++j) {
        if (!(radii[j] > 0.0)) continue;
        std::mt19937_64 rng(settings.seed + j);
        std::normal_distribution<double> normal(0.0, 1.0);
        Vector v(param.size());
        for (auto& x : v) x = normal(rng);
        RobinField dir = param.synthesize(v);
        const double size = robin_l2_distance(domain, dir, RobinField{std::vector<double>(dir.values.size(), 0.0),
                                                                      RobinField::Representation::PiecewiseConstant});
        if (!(size > 0.0)) continue;
        RobinField h = h0;
        for (size_t i = 0; i < h.values.size(); ++i) h.values[i] += radii[j] / size * dir.values[i];
        const bool admissible = std::all_of(h.values.begin(), h.values.end(), [&](double x) { return x >= param.h_min(); });
        if (!admissible || robin_c1_norm(param, h) > M) continue;
        fields[j] = std::move(h);
        usable[j] = true;
    }

    const Measurement base = forward_measure(domain, p, h0, settings.solver);
    std::vector<StabilityPair> all(n);
    parallel_for(n, settings.threads, [&](size_t j) {
        if (!usable[j]) return;
        const Measurement m = forward_measure(domain, p, fields[j], settings.solver);
        all[j] = {radii[j], measurement_distance(m, base), robin_l2_distance(domain, fields[j], h0), false};
    });

    StabilityProbeResult out;
    out.M_used = M;
    for (size_t j = 0; j < n; ++j) {
        const auto& pr = all[j];
        if (usable[j] && pr.data_distance > 0.0 && pr.error > 0.0 && std::isfinite(pr.data_distance)) {
            out.pairs.push_back(pr);
        }
    }
    const size_t valid = out.pairs.size();
    if (settings.holdout_every > 1) {
        for (size_t i = 1; i + 1 < valid; ++i) {
            if (i % static_cast<size_t>(settings.holdout_every) == static_cast<size_t>(settings.holdout_every) - 1) {
                out.pairs[i].held_out = true;
            }
        }
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& pr : out.pairs) {
        if (pr.held_out) continue;
        xs.push_back(std::log(pr.data_distance));
        ys.push_back(std::log(pr.error));
    }
    if (xs.size() < 5) throw Error(ErrorCode::InsufficientData, "stability fit needs at least 5 valid pairs");

    const double nx = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / nx;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / nx;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::InsufficientData, "stability pairs do not spread in data distance");
    out.alpha_hat = sxy / sxx;
    out.intercept = my - out.alpha_hat * mx;
    out.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;

    const double scale = std::pow(M, 1.0 - out.alpha_hat);
    for (const auto& pr : out.pairs) {
        if (pr.held_out) continue;
        out.C0 = std::max(out.C0, pr.error / (scale * std::pow(pr.data_distance, out.alpha_hat)));
    }
    out.holdout_ok = true;
    for (const auto& pr : out.pairs) {
        if (pr.held_out && pr.error > out.C0 * scale * std::pow(pr.data_distance, out.alpha_hat)) out.holdout_ok = false;
    }
    return out;
}

double uniqueness_probe(const DiscreteDomain& domain, double p, const std::vector<RobinField>& fields,
                        const EigenSolveSettings& settings, int threads) {
    if (fields.size() < 2) throw Error(ErrorCode::InvalidParameter, "uniqueness probe needs at least two fields");
    std::vector<Measurement> data(fields.size());
    parallel_for(fields.size(), threads, [&](size_t i) { data[i] = forward_measure(domain, p, fields[i], settings); });
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < data.size(); ++i) {
        for (size_t j = i + 1; j < data.size(); ++j) best = std::min(best, measurement_distance(data[i], data[j]));
    }
    return best;
}

void write_measurement_csv(std::ostream& out, const Measurement& m) {
    out << "lambda";
    for (int id : m.face_ids) out << ',' << id;
    out << '\n' << sci(m.lambda);
    for (double q : m.flux_trace) out << ',' << sci(q);
    out << '\n';
}

Measurement read_measurement_csv(std::istream& in, const DiscreteDomain& domain, double p) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            const auto a = cell.find_first_not_of(" \t\r");
            const auto b = cell.find_last_not_of(" \t\r");
            cells.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
        }
        return cells;
    };
    std::string header;
    std::string row;
    if (!std::getline(in, header) || !std::getline(in, row)) {
        throw Error(ErrorCode::IoError, "measurement CSV needs a header and one data row");
    }
    const auto names = split(header);
    const auto cells = split(row);
    if (names.empty() || names[0] != "lambda") throw Error(ErrorCode::IoError, "measurement CSV must start with 'lambda'");
    if (cells.size() != names.size()) throw Error(ErrorCode::IoError, "measurement CSV row and header differ in length");

    Measurement m;
    m.p = p;
    try {
        m.lambda = std::stod(cells[0]);
        for (size_t i = 1; i < names.size(); ++i) {
            const int id = std::stoi(names[i]);
            if (id < 0 || static_cast<size_t>(id) >= domain.boundary_faces().size() ||
                domain.boundary_faces()[id].label != BoundaryLabel::Dirichlet) {
                throw Error(ErrorCode::InvalidParameter, "measurement face " + names[i] + " is not a Dirichlet face");
            }
            m.face_ids.push_back(id);
            m.flux_trace.push_back(std::stod(cells[i]));
            m.face_measure.push_back(domain.boundary_faces()[id].measure);
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::IoError, "malformed number in measurement CSV");
    }
    return m;
}

void write_reconstruction_report(std::ostream& out, const ReconstructionResult& result) {
    out << "iteration,misfit,step_norm,reg_weight\n";
    for (size_t i = 0; i < result.residual_history.size(); ++i) {
        out << i << ',' << sci(result.residual_history[i]) << ',' << sci(result.step_norms[i]) << ','
            << sci(result.regularization_weight) << '\n';
    }
}

}  // namespace probin
