#include "probin/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "probin/errors.hpp"
#include "probin/inverse.hpp"
#include "probin/limits.hpp"
#include "probin/mesh_io.hpp"
#include "probin/parallel.hpp"
#include "probin/sensitivity.hpp"

#ifndef PROBIN_VERSION
#define PROBIN_VERSION "unknown"
#endif

namespace probin {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

/// One CSV artifact, closed when it goes out of scope.
class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw Error(ErrorCode::IoError, "cannot write " + path.string());
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GammaEnd interval_gamma(const std::string& g) {
    if (g == "left") return GammaEnd::Left;
    if (g == "right") return GammaEnd::Right;
    if (g == "both") return GammaEnd::Both;
    return GammaEnd::None;
}

std::vector<std::string> split_sides(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, '+');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> default_continuity_grid(double p0) {
    std::vector<double> grid;
    for (int i = -4; i <= 4; ++i) grid.push_back(p0 + 0.05 * i);
    return grid;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

RobinParameterization build_param(const RunConfig& cfg, const DiscreteDomain& domain) {
    return cfg.basis == "bspline" ? RobinParameterization::bspline(domain, cfg.k, cfg.degree, cfg.h_min)
                                  : RobinParameterization::piecewise_constant(domain, cfg.k, cfg.h_min);
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_scan(const fs::path& path, const LimitScanResult& scan) {
    std::vector<std::string> header{scan.parameter_name, scan.observable_name};
    for (const auto& [name, _] : scan.auxiliary) header.push_back(name);
    Csv csv(path, header);
    for (size_t i = 0; i < scan.parameter.size(); ++i) {
        std::vector<std::string> row{num(scan.parameter[i]), num(scan.observable[i])};
        for (const auto& [_, values] : scan.auxiliary) row.push_back(num(values[i]));
        csv.row(row);
    }
}

std::string optional_num(const std::optional<double>& v) { return v ? num(*v) : "null"; }

// Subcommands. Each returns the list of artifacts it wrote.

std::vector<std::string> cmd_solve(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const DiscreteDomain domain = build_domain(cfg);
    const RobinField h = build_h(cfg, domain);
    const Eigenpair pair = principal_eigenpair(domain, cfg.p, h, build_settings(cfg));
    log << "lambda = " << num(pair.lambda) << " (" << pair.iterations << " iterations)\n";
    {
        std::vector<std::string> header{"node", "u", "x"};
        if (domain.mode() == DimMode::Planar) header.push_back("y");
        Csv csv(out / "eigenpair.csv", header);
        for (size_t i = 0; i < domain.num_nodes(); ++i) {
            std::vector<std::string> row{std::to_string(i), num(pair.u[static_cast<Eigen::Index>(i)]),
                                         num(domain.nodes()[i].x())};
            if (domain.mode() == DimMode::Planar) row.push_back(num(domain.nodes()[i].y()));
            csv.row(row);
        }
    }
    {
        Csv csv(out / "summary.csv", {"lambda", "residual", "iters"});
        csv.row({num(pair.lambda), num(pair.residual_norm), std::to_string(pair.iterations)});
    }
    {
        Csv csv(out / "flux.csv", {"face", "label", "flux"});
        for (BoundaryLabel label : {BoundaryLabel::Dirichlet, BoundaryLabel::Robin}) {
            const auto faces = domain.faces_with_label(label);
            if (faces.empty()) continue;
            const auto flux = boundary_flux(domain, cfg.p, pair, label);
            for (size_t i = 0; i < faces.size(); ++i) csv.row({std::to_string(faces[i]), to_string(label), num(flux[i])});
        }
    }
    return {"eigenpair.csv", "summary.csv", "flux.csv"};
}

std::vector<std::string> cmd_coating_sweep(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const DiscreteDomain base = build_domain(cfg);
    ThicknessProfile rho;
    const size_t n_gamma = base.partition().robin_faces.size();
    rho.rho_values = cfg.rho.size() == 1 ? std::vector<double>(n_gamma, cfg.rho[0]) : cfg.rho;
    CoatingSweepSettings settings;
    settings.layer_cells = cfg.layer_cells;
    settings.threads = resolve_threads(cfg.threads);
    settings.solver = build_settings(cfg);
    const LimitScanResult scan = coating_sweep(base, rho, cfg.p, cfg.epsilons, settings);

    Csv csv(out / "sweep.csv", {"epsilon", "Lambda1", "coating_mass", "mu1", "abs_gap"});
    for (size_t i = 0; i < scan.parameter.size(); ++i) {
        csv.row({num(scan.parameter[i]), num(scan.observable[i]), num(scan.column("coating_mass")[i]),
                 num(scan.column("mu1")[i]), num(scan.column("abs_gap")[i])});
    }
    std::ofstream rate(out / "rate.txt");
    rate << "rate = " << optional_num(scan.rate) << "\npoints = " << scan.rate_points << '\n';
    log << "log-log rate = " << optional_num(scan.rate) << '\n';
    return {"sweep.csv", "rate.txt"};
}

std::vector<std::string> cmd_derivative_check(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const DiscreteDomain domain = build_domain(cfg);
    const RobinField h = build_h(cfg, domain);
    const EigenSolveSettings settings = build_settings(cfg);
    const int threads = resolve_threads(cfg.threads);
    const RobinField xi = RobinField::constant(domain, cfg.xi);

    const Eigenpair base = principal_eigenpair(domain, cfg.p, h, settings);
    const LinearizedSolution lin = solve_linearized(domain, cfg.p, h, base, xi, cfg.delta);
    const double formula = lambda_derivative(base, xi, domain);
    const auto flux_prime = linearized_boundary_flux(domain, cfg.p, base, lin, BoundaryLabel::Dirichlet);

    auto shifted = [&](double t) { return h + t * xi; };
    // FD step first, then the remainder probe steps.
    std::vector<double> steps{cfg.fd_step};
    steps.insert(steps.end(), cfg.remainder_steps.begin(), cfg.remainder_steps.end());
    std::vector<Eigenpair> plus(steps.size());
    std::vector<Eigenpair> minus(steps.size());
    parallel_for(2 * steps.size(), threads, [&](size_t i) {
        const double t = steps[i / 2];
        if (i % 2 == 0) {
            plus[i / 2] = principal_eigenpair(domain, cfg.p, shifted(t), settings);
        } else {
            minus[i / 2] = principal_eigenpair(domain, cfg.p, shifted(-t), settings);
        }
    });
    const double fd = (plus[0].lambda - minus[0].lambda) / (2.0 * steps[0]);
    const double rel = std::abs(fd - formula) / std::max(std::abs(formula), 1e-300);

    std::vector<double> ts;
    std::vector<double> rems;
    {
        Csv csv(out / "derivative.csv", {"t", "lambda_plus", "lambda_minus", "central_difference", "remainder"});
        for (size_t i = 1; i < steps.size(); ++i) {
            const double t = steps[i];
            const double remainder = std::abs(plus[i].lambda - base.lambda - t * formula);
            csv.row({num(t), num(plus[i].lambda), num(minus[i].lambda),
                     num((plus[i].lambda - minus[i].lambda) / (2.0 * t)), num(remainder)});
            if (remainder > 0.0) {
                ts.push_back(std::log(t));
                rems.push_back(std::log(remainder));
            }
        }
    }
    double slope = std::nan("");
    if (ts.size() >= 2) {
        const double mx = std::accumulate(ts.begin(), ts.end(), 0.0) / ts.size();
        const double my = std::accumulate(rems.begin(), rems.end(), 0.0) / rems.size();
        double sxx = 0.0;
        double sxy = 0.0;
        for (size_t i = 0; i < ts.size(); ++i) {
            sxx += (ts[i] - mx) * (ts[i] - mx);
            sxy += (ts[i] - mx) * (rems[i] - my);
        }
        slope = sxy / sxx;
    }
    {
        Csv csv(out / "derivative_summary.csv",
                {"lambda", "lambda_prime_formula", "lambda_prime_saddle", "central_difference", "fd_rel_error",
                 "remainder_slope", "constraint_residual", "delta"});
        csv.row({num(base.lambda), num(formula), num(lin.lambda_prime), num(fd), num(rel), num(slope),
                 num(lin.constraint_residual), num(lin.delta)});
    }
    {
        const auto fp = boundary_flux(domain, cfg.p, plus[0], BoundaryLabel::Dirichlet);
        const auto fm = boundary_flux(domain, cfg.p, minus[0], BoundaryLabel::Dirichlet);
        const auto faces = domain.faces_with_label(BoundaryLabel::Dirichlet);
        Csv csv(out / "flux_derivative.csv", {"face", "linearized", "central_difference"});
        for (size_t i = 0; i < faces.size(); ++i) {
            csv.row({std::to_string(faces[i]), num(flux_prime[i]), num((fp[i] - fm[i]) / (2.0 * steps[0]))});
        }
    }
    log << "lambda' formula = " << num(formula) << ", saddle = " << num(lin.lambda_prime) << ", FD = " << num(fd)
        << ", remainder slope = " << num(slope) << '\n';
    return {"derivative.csv", "derivative_summary.csv", "flux_derivative.csv"};
}

std::vector<std::string> cmd_reconstruct(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const DiscreteDomain domain = build_domain(cfg);
    const RobinParameterization param = build_param(cfg, domain);
    const EigenSolveSettings solver = build_settings(cfg);
    const int threads = resolve_threads(cfg.threads);

    const bool synthetic = cfg.data_file.empty();
    Vector c_true = cfg.h_true.empty() ? param.fit(build_h(cfg, domain)) : to_vector(cfg.h_true);
    Measurement clean;
    if (synthetic) {
        clean = forward_measure(domain, cfg.p, param.synthesize(c_true), solver);
    } else {
        std::ifstream in(cfg.data_file);
        clean = read_measurement_csv(in, domain, cfg.p);
    }
    const Vector c_init = cfg.init.empty() ? param.project(cfg.init_scale * c_true) : to_vector(cfg.init);

    GaussNewtonSettings gn;
    gn.max_iters = cfg.gn_max_iters;
    gn.solver = solver;
    gn.delta = cfg.delta;
    const NoiseModel noise{cfg.noise, cfg.lambda_noise};
    const int n = cfg.realizations;
    gn.threads = n > 1 ? 1 : threads;

    std::vector<ReconstructionResult> results(static_cast<size_t>(n));
    std::vector<Measurement> data(static_cast<size_t>(n));
    parallel_for(static_cast<size_t>(n), threads, [&](size_t r) {
        data[r] = (noise.flux_level > 0.0 || noise.lambda_level > 0.0) ? noise.apply(clean, cfg.seed + r) : clean;
        try {
            if (cfg.reg_sweep.empty()) {
                results[r] = gauss_newton_reconstruct(domain, cfg.p, data[r], param, c_init, cfg.reg_weight, gn);
            } else {
                results[r] = discrepancy_reconstruct(domain, cfg.p, data[r], param, c_init, cfg.reg_sweep,
                                                     noise.expected_misfit(clean), gn);
            }
        } catch (const NoDescentDirectionError& e) {
            results[r] = e.best();
        }
    });

    {
        std::ofstream m(out / "measurement.csv");
        write_measurement_csv(m, clean);
    }
    {
        std::ofstream rep(out / "report.csv");
        write_reconstruction_report(rep, results[0]);
    }
    std::vector<double> errors;
    {
        std::vector<std::string> header{"realization", "rel_error", "misfit", "iterations", "converged", "reg_weight"};
        for (int j = 0; j < param.size(); ++j) header.push_back("c" + std::to_string(j));
        Csv csv(out / "realizations.csv", header);
        for (int r = 0; r < n; ++r) {
            const auto& res = results[static_cast<size_t>(r)];
            const double err = synthetic ? (res.c_hat - c_true).norm() / c_true.norm() : std::nan("");
            errors.push_back(err);
            std::vector<std::string> row{std::to_string(r), num(err), num(res.residual_history.back()),
                                         std::to_string(res.iterations), res.converged ? "1" : "0",
                                         num(res.regularization_weight)};
            for (int j = 0; j < param.size(); ++j) row.push_back(num(res.c_hat[j]));
            csv.row(row);
        }
    }
    {
        std::vector<std::string> header{"median_rel_error", "realizations"};
        for (int j = 0; j < param.size(); ++j) header.push_back("c_true" + std::to_string(j));
        Csv csv(out / "reconstruct_summary.csv", header);
        std::vector<std::string> row{num(median(errors)), std::to_string(n)};
        for (int j = 0; j < param.size(); ++j) row.push_back(synthetic ? num(c_true[j]) : "nan");
        csv.row(row);
    }
    log << "median relative error = " << num(median(errors)) << '\n';
    return {"measurement.csv", "report.csv", "realizations.csv", "reconstruct_summary.csv"};
}

std::vector<std::string> cmd_stability_probe(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const DiscreteDomain domain = build_domain(cfg);
    const RobinField h0 = build_h(cfg, domain);
    const RobinParameterization param = build_param(cfg, domain);
    StabilityProbeSettings settings;
    settings.holdout_every = cfg.holdout_every;
    settings.seed = cfg.seed;
    settings.threads = resolve_threads(cfg.threads);
    settings.solver = build_settings(cfg);
    const StabilityProbeResult res = stability_probe(domain, cfg.p, h0, param, cfg.radii, cfg.M, settings);
    {
        Csv csv(out / "pairs.csv", {"radius", "data_distance", "error", "held_out"});
        for (const auto& pr : res.pairs) {
            csv.row({num(pr.radius), num(pr.data_distance), num(pr.error), pr.held_out ? "1" : "0"});
        }
    }
    {
        Csv csv(out / "stability.csv", {"alpha_hat", "intercept", "r_squared", "C0", "M", "holdout_ok"});
        csv.row({num(res.alpha_hat), num(res.intercept), num(res.r_squared), num(res.C0), num(res.M_used),
                 res.holdout_ok ? "1" : "0"});
    }
    log << "alpha_hat = " << num(res.alpha_hat) << ", R^2 = " << num(res.r_squared) << '\n';
    return {"pairs.csv", "stability.csv"};
}

std::vector<std::string> cmd_limits_scan(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const int threads = resolve_threads(cfg.threads);
    if (cfg.kind == "p1") {
        const auto grid = cfg.p_grid.empty() ? std::vector<double>{2.0, 1.5, 1.2, 1.1, 1.05, 1.02, 1.01} : cfg.p_grid;
        write_scan(out / "scan.csv", p_limit_scan_one(cfg.rho_values, grid));
        return {"scan.csv"};
    }
    if (cfg.kind == "pinf") {
        const auto grid = cfg.p_grid.empty() ? std::vector<double>{2.0, 4.0, 8.0, 16.0, 32.0} : cfg.p_grid;
        std::vector<std::string> header{"rho", "classification"};
        for (double p : grid) {
            char label[48];
            std::snprintf(label, sizeof label, "h_p=%g", p);
            header.push_back(label);
        }
        Csv csv(out / "classify.csv", header);
        for (double rho : cfg.rho_values) {
            std::vector<std::string> row{num(rho), to_string(p_limit_classify_inf(rho, grid))};
            for (double p : grid) row.push_back(num(std::pow(rho, -(p - 1.0))));
            csv.row(row);
        }
        return {"classify.csv"};
    }
    if (cfg.kind == "continuity") {
        const DiscreteDomain domain = build_domain(cfg);
        const RobinField h = build_h(cfg, domain);
        const auto grid = cfg.p_grid.empty() ? default_continuity_grid(cfg.p0) : cfg.p_grid;
        const LimitScanResult scan = p_continuity_scan(domain, h, grid, build_settings(cfg), threads);
        write_scan(out / "scan.csv", scan);
        std::ofstream txt(out / "continuity.txt");
        const bool anomaly = scan.max_jump_ratio && *scan.max_jump_ratio > kJumpAnomalyFactor;
        txt << "max_jump = " << optional_num(scan.max_jump) << "\nmax_jump_ratio = " << optional_num(scan.max_jump_ratio)
            << "\nanomaly = " << (anomaly ? 1 : 0) << '\n';
        log << "max jump ratio = " << optional_num(scan.max_jump_ratio) << '\n';
        return {"scan.csv", "continuity.txt"};
    }
    if (cfg.kind == "linf") {
        const DiscreteDomain interval = build_interval_domain(cfg.cells, GammaEnd::Right);
        const int n = cfg.grid_points;
        std::vector<double> knees;
        for (int i = 1; i < n; ++i) knees.push_back(static_cast<double>(i) / n);
        const auto heights = uniform_grid(0.05, 2.0, n);
        const KneeScan best = linf_knee_scan(interval, knees, heights);
        Csv csv(out / "linf.csv", {"knee", "height", "value"});
        csv.row({num(best.knee), num(best.height), num(best.value)});
        log << "min L-infinity quotient = " << num(best.value) << '\n';
        return {"linf.csv"};
    }
    // bv
    std::vector<double> a_grid;
    for (int i = 0; i < cfg.grid_points; ++i) a_grid.push_back(static_cast<double>(i) / cfg.grid_points);
    {
        Csv csv(out / "bv.csv", {"a", "quotient"});
        for (double a : a_grid) csv.row({num(a), num(bv_quotient_eval(BVProfile::step(a)))});
    }
    const auto [level, at] = bv_step_minimum(a_grid);
    const DiscreteDomain interval = build_interval_domain(cfg.cells, GammaEnd::Right);
    const auto grid = cfg.p_grid.empty() ? std::vector<double>{1.3, 1.2, 1.1} : cfg.p_grid;
    const LimitScanResult scan =
        p_continuity_scan(interval, RobinField::constant(interval, 1.0), grid, build_settings(cfg), threads);
    Csv csv(out / "bv_trend.csv", {"p", "lambda1", "gap_to_bv_level"});
    for (size_t i = 0; i < grid.size(); ++i) csv.row({num(grid[i]), num(scan.observable[i]), num(scan.observable[i] - level)});
    log << "BV step level = " << num(level) << " at a = " << num(at) << '\n';
    return {"bv.csv", "bv_trend.csv"};
}

std::uint64_t inputs_hash(const RunConfig& cfg) {
    std::uint64_t h = fnv1a(emit_config(cfg));
    for (const auto* path : {&cfg.mesh_file, &cfg.h_file, &cfg.data_file}) {
        if (!path->empty()) h = fnv1a(read_file(*path), h);
    }
    return h;
}

void write_manifest(const fs::path& out, const nlohmann::ordered_json& j) {
    std::ofstream m(out / "manifest.json");
    m << j.dump(2) << '\n';
}

}  // namespace

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NoConvergence: return kExitNoConvergence;
        case ErrorCode::ConfigError: return kExitConfigError;
        default: return kExitFailure;
    }
}

DiscreteDomain build_domain(const RunConfig& cfg) {
    if (cfg.mode == "interval") return build_interval_domain(cfg.cells, interval_gamma(cfg.gamma));
    if (cfg.mode == "radial") {
        RadialPartition part;
        part.inner = cfg.gamma == "inner" ? BoundaryLabel::Robin : BoundaryLabel::Dirichlet;
        part.outer = cfg.gamma == "outer" ? BoundaryLabel::Robin : BoundaryLabel::Dirichlet;
        return build_radial_domain(cfg.cells, cfg.r_inner, cfg.r_outer, cfg.space_dim, part);
    }
    if (cfg.mode == "file") return read_mesh_file(cfg.mesh_file);
    PlanarMesh mesh;
    if (cfg.shape == "square") {
        mesh = unit_square_mesh(cfg.n_angular, split_sides(cfg.gamma));
    } else if (cfg.shape == "annulus") {
        mesh = annulus_mesh(cfg.n_radial, cfg.n_angular, cfg.r_inner, cfg.r_outer, cfg.gamma);
    } else {
        mesh = disk_mesh(cfg.levels, cfg.gamma == "robin" ? BoundaryLabel::Robin : BoundaryLabel::Dirichlet);
    }
    return build_planar_domain(mesh.vertices, mesh.triangles, mesh.faces);
}

RobinField build_h(const RunConfig& cfg, const DiscreteDomain& domain) {
    std::vector<double> values = cfg.h;
    if (!cfg.h_file.empty()) {
        values.clear();
        std::stringstream ss(read_file(cfg.h_file));
        for (std::string tok; ss >> tok;) {
            std::replace(tok.begin(), tok.end(), ',', ' ');
            std::stringstream parts(tok);
            for (double v; parts >> v;) values.push_back(v);
        }
    }
    const size_t n = domain.partition().robin_faces.size();
    RobinField h;
    if (values.size() == 1) {
        h = RobinField::constant(domain, values[0]);
    } else {
        if (values.size() != n) {
            throw Error(ErrorCode::ConfigError, "h needs one value or one value per Robin face (" + std::to_string(n) + ")");
        }
        h = RobinField{values, RobinField::Representation::PiecewiseConstant};
    }
    try {
        h.validate(domain);
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, "h must be nonnegative");
    }
    return h;
}

EigenSolveSettings build_settings(const RunConfig& cfg) {
    EigenSolveSettings s;
    s.tol_lambda = cfg.tol_lambda;
    s.tol_u = cfg.tol_u;
    s.max_outer = cfg.max_outer;
    s.seed = cfg.seed;
    s.inner.max_iters = cfg.newton_max_iters;
    s.inner.delta_scale = cfg.newton_delta_scale;
    s.inner.backtrack = cfg.newton_backtrack;
    return s;
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

int run(const RunConfig& cfg, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path out(cfg.out);
    fs::create_directories(out);
    {
        std::ofstream resolved(out / "resolved_config");
        resolved << emit_config(cfg);
    }

    nlohmann::ordered_json manifest;
    manifest["subcommand"] = cfg.subcommand;
    manifest["seed"] = cfg.seed;
    manifest["threads"] = resolve_threads(cfg.threads);
    manifest["version"] = PROBIN_VERSION;
    manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION);

    int code = kExitOk;
    std::vector<std::string> artifacts;
    try {
        char hash[20];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(inputs_hash(cfg)));
        manifest["inputs_hash"] = hash;
        validate_config(cfg);
        if (cfg.subcommand == "solve") {
            artifacts = cmd_solve(cfg, out, log);
        } else if (cfg.subcommand == "coating-sweep") {
            artifacts = cmd_coating_sweep(cfg, out, log);
        } else if (cfg.subcommand == "derivative-check") {
            artifacts = cmd_derivative_check(cfg, out, log);
        } else if (cfg.subcommand == "reconstruct") {
            artifacts = cmd_reconstruct(cfg, out, log);
        } else if (cfg.subcommand == "stability-probe") {
            artifacts = cmd_stability_probe(cfg, out, log);
        } else {
            artifacts = cmd_limits_scan(cfg, out, log);
        }
        manifest["status"] = "ok";
        manifest["error_code"] = nullptr;
        manifest["error_message"] = nullptr;
    } catch (const Error& e) {
        code = exit_code_for(e.code());
        manifest["status"] = "error";
        manifest["error_code"] = std::string(to_string(e.code()));
        manifest["error_message"] = e.what();
        log << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        code = kExitFailure;
        manifest["status"] = "error";
        manifest["error_code"] = "Internal";
        manifest["error_message"] = e.what();
        log << "error: " << e.what() << '\n';
    }
    artifacts.insert(artifacts.begin(), "resolved_config");
    manifest["artifacts"] = artifacts;
    manifest["exit_code"] = code;
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(out, manifest);
    return code;
}

void write_failure_manifest(const std::string& out_dir, ErrorCode code, const std::string& message) {
    const fs::path out(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) return;
    nlohmann::ordered_json manifest;
    manifest["status"] = "error";
    manifest["error_code"] = std::string(to_string(code));
    manifest["error_message"] = message;
    manifest["exit_code"] = exit_code_for(code);
    manifest["version"] = PROBIN_VERSION;
    write_manifest(out, manifest);
}

}  // namespace probin
