#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace probin {

/// Everything a CLI run needs. Text form is flat `key = value` lines grouped
/// under `[section]` headers; see emit_config for the full key list.
struct RunConfig {
    // [run]
    std::string subcommand = "solve";
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out = "out";

    // [domain]
    std::string mode = "interval";  // interval | radial | planar | file
    int cells = 2048;
    std::string gamma = "right";  // interval: left|right|both|none; radial/annulus: inner|outer; square: side list; disk: robin|dirichlet
    double r_inner = 0.5;
    double r_outer = 1.0;
    int space_dim = 2;
    std::string shape = "annulus";  // square | annulus | disk
    int n_radial = 6;
    int n_angular = 48;
    int levels = 3;
    std::string mesh_file;

    // [problem]
    double p = 2.0;
    std::vector<double> h{1.0};  // one value = constant, else one per Robin face
    std::string h_file;

    // [solver]
    double tol_lambda = 1e-10;
    double tol_u = 1e-8;
    int max_outer = 2000;
    int newton_max_iters = 60;
    double newton_delta_scale = 1e-8;
    double newton_backtrack = 0.5;

    // [coating]
    std::vector<double> rho{1.0};
    std::vector<double> epsilons{0.1, 0.05, 0.025, 0.0125};
    int layer_cells = 8;

    // [derivative]
    double xi = 1.0;
    double fd_step = 1e-4;
    std::vector<double> remainder_steps{1e-2, 1e-3, 1e-4, 1e-5};
    double delta = 0.0;

    // [inverse]
    std::string basis = "piecewise";  // piecewise | bspline
    int k = 1;
    int degree = 2;
    double h_min = 1e-3;
    std::vector<double> h_true;  // coefficients of the synthetic truth; empty = fit of [problem] h
    std::vector<double> init;    // initial coefficients; empty = init_scale · truth
    double init_scale = 0.5;
    double reg_weight = 1e-10;
    std::vector<double> reg_sweep;  // non-empty enables the discrepancy principle
    double noise = 0.0;
    double lambda_noise = 0.0;
    int realizations = 1;
    int gn_max_iters = 30;
    std::string data_file;

    // [stability]
    std::vector<double> radii{1e-3, 1.6e-3, 2.5e-3, 4e-3, 6.3e-3, 1e-2, 1.6e-2, 2.5e-2, 4e-2, 6.3e-2, 1e-1};
    double M = 4.0;
    int holdout_every = 3;

    // [limits]
    std::string kind = "p1";  // p1 | pinf | continuity | linf | bv
    std::vector<double> rho_values{0.5, 2.0};
    std::vector<double> p_grid;  // empty = kind-specific default
    double p0 = 2.0;
    int grid_points = 101;

    bool operator==(const RunConfig&) const = default;
};

const std::vector<std::string>& subcommands();

/// Parses config text. Unknown keys and range violations throw ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// Applies one `section.key=value` (or bare `key=value`) override.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Checks ranges, file existence and subcommand preconditions.
void validate_config(const RunConfig& cfg);

/// Full text form of the config; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& cfg);

}  // namespace probin
