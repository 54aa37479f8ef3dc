#include "probin/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "probin/errors.hpp"

namespace probin {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& s) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    config_error(key + ": expected a number, got '" + s + "'");
}

long long parse_int(const std::string& key, const std::string& s) {
    try {
        size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    config_error(key + ": expected an integer, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_double(key, trim(item)));
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
    return out;
}

std::string qualified(const char* section, const char* key) { return std::string(section) + "." + key; }

struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

template <class T>
Field text(const char* section, const char* key, T RunConfig::*member) {
    return {section, key, [member](const RunConfig& c) { return c.*member; },
            [member](RunConfig& c, const std::string& v) { c.*member = v; }};
}

Field real(const char* section, const char* key, double RunConfig::*member) {
    return {section, key, [member](const RunConfig& c) { return fmt(c.*member); },
            [member, name = qualified(section, key)](RunConfig& c, const std::string& v) {
                c.*member = parse_double(name, v);
            }};
}

Field integer(const char* section, const char* key, int RunConfig::*member) {
    return {section, key, [member](const RunConfig& c) { return std::to_string(c.*member); },
            [member, name = qualified(section, key)](RunConfig& c, const std::string& v) {
                const long long x = parse_int(name, v);
                if (x < -2147483647LL || x > 2147483647LL) config_error(name + ": integer out of range");
                c.*member = static_cast<int>(x);
            }};
}

Field list(const char* section, const char* key, std::vector<double> RunConfig::*member) {
    return {section, key, [member](const RunConfig& c) { return join(c.*member); },
            [member, name = qualified(section, key)](RunConfig& c, const std::string& v) {
                c.*member = parse_list(name, v);
            }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        text("run", "subcommand", &RunConfig::subcommand),
        {"run", "seed", [](const RunConfig& c) { return std::to_string(c.seed); },
         [](RunConfig& c, const std::string& v) {
             if (v.empty() || v[0] == '-') config_error("seed must be a nonnegative integer");
             try {
                 size_t pos = 0;
                 c.seed = std::stoull(v, &pos);
                 if (pos != v.size()) config_error("seed must be a nonnegative integer");
             } catch (const std::logic_error&) {
                 config_error("seed must be a nonnegative integer");
             }
         }},
        integer("run", "threads", &RunConfig::threads),
        text("run", "out", &RunConfig::out),

        text("domain", "mode", &RunConfig::mode),
        integer("domain", "cells", &RunConfig::cells),
        text("domain", "gamma", &RunConfig::gamma),
        real("domain", "r_inner", &RunConfig::r_inner),
        real("domain", "r_outer", &RunConfig::r_outer),
        integer("domain", "space_dim", &RunConfig::space_dim),
        text("domain", "shape", &RunConfig::shape),
        integer("domain", "n_radial", &RunConfig::n_radial),
        integer("domain", "n_angular", &RunConfig::n_angular),
        integer("domain", "levels", &RunConfig::levels),
        text("domain", "mesh_file", &RunConfig::mesh_file),

        real("problem", "p", &RunConfig::p),
        list("problem", "h", &RunConfig::h),
        text("problem", "h_file", &RunConfig::h_file),

        real("solver", "tol_lambda", &RunConfig::tol_lambda),
        real("solver", "tol_u", &RunConfig::tol_u),
        integer("solver", "max_outer", &RunConfig::max_outer),
        integer("solver", "newton_max_iters", &RunConfig::newton_max_iters),
        real("solver", "newton_delta_scale", &RunConfig::newton_delta_scale),
        real("solver", "newton_backtrack", &RunConfig::newton_backtrack),

        list("coating", "rho", &RunConfig::rho),
        list("coating", "epsilons", &RunConfig::epsilons),
        integer("coating", "layer_cells", &RunConfig::layer_cells),

        real("derivative", "xi", &RunConfig::xi),
        real("derivative", "fd_step", &RunConfig::fd_step),
        list("derivative", "remainder_steps", &RunConfig::remainder_steps),
        real("derivative", "delta", &RunConfig::delta),

        text("inverse", "basis", &RunConfig::basis),
        integer("inverse", "k", &RunConfig::k),
        integer("inverse", "degree", &RunConfig::degree),
        real("inverse", "h_min", &RunConfig::h_min),
        list("inverse", "h_true", &RunConfig::h_true),
        list("inverse", "init", &RunConfig::init),
        real("inverse", "init_scale", &RunConfig::init_scale),
        real("inverse", "reg_weight", &RunConfig::reg_weight),
        list("inverse", "reg_sweep", &RunConfig::reg_sweep),
        real("inverse", "noise", &RunConfig::noise),
        real("inverse", "lambda_noise", &RunConfig::lambda_noise),
        integer("inverse", "realizations", &RunConfig::realizations),
        integer("inverse", "gn_max_iters", &RunConfig::gn_max_iters),
        text("inverse", "data_file", &RunConfig::data_file),

        list("stability", "radii", &RunConfig::radii),
        real("stability", "M", &RunConfig::M),
        integer("stability", "holdout_every", &RunConfig::holdout_every),

        text("limits", "kind", &RunConfig::kind),
        list("limits", "rho_values", &RunConfig::rho_values),
        list("limits", "p_grid", &RunConfig::p_grid),
        real("limits", "p0", &RunConfig::p0),
        integer("limits", "grid_points", &RunConfig::grid_points),
    };
    return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
    for (const auto& f : fields()) {
        if (f.key == key && (section.empty() || f.section == section)) return &f;
    }
    return nullptr;
}

void require(bool ok, const std::string& msg) {
    if (!ok) config_error(msg);
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
    return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

void require_file(const std::string& path, const std::string& key) {
    if (!path.empty() && !std::filesystem::is_regular_file(path)) config_error(key + ": file not found: " + path);
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = {"solve",           "coating-sweep", "derivative-check",
                                                   "reconstruct",     "stability-probe", "limits-scan"};
    return names;
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') config_error("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            const bool known = std::any_of(fields().begin(), fields().end(),
                                           [&](const Field& f) { return f.section == section; });
            if (!known) config_error("unknown section '" + section + "'");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) config_error("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const Field* f = find_field(section, key);
        if (!f) config_error("unknown key '" + (section.empty() ? key : section + "." + key) + "'");
        f->set(cfg, trim(t.substr(eq + 1)));
    }
    validate_config(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot read config file " + path);
    return parse_config(in);
}

RunConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) config_error("override '" + assignment + "' must look like key=value");
    const std::string name = trim(assignment.substr(0, eq));
    const auto dot = name.find('.');
    const std::string section = dot == std::string::npos ? "" : name.substr(0, dot);
    const std::string key = dot == std::string::npos ? name : name.substr(dot + 1);
    const Field* f = find_field(section, key);
    if (!f) config_error("unknown key '" + name + "'");
    f->set(cfg, trim(assignment.substr(eq + 1)));
}

void validate_config(const RunConfig& c) {
    const auto& subs = subcommands();
    require(std::find(subs.begin(), subs.end(), c.subcommand) != subs.end(), "unknown subcommand '" + c.subcommand + "'");
    require(c.threads >= 1, "threads must be at least 1");
    require(!c.out.empty(), "out must not be empty");

    require(one_of(c.mode, {"interval", "radial", "planar", "file"}), "mode must be interval, radial, planar or file");
    if (c.mode == "interval") {
        require(one_of(c.gamma, {"left", "right", "both", "none"}), "interval gamma must be left, right, both or none");
    }
    if (c.mode == "interval" || c.mode == "radial") require(c.cells >= 2, "cells must be at least 2");
    if (c.mode == "radial") {
        require(c.r_inner >= 0.0 && c.r_inner < c.r_outer, "radial mesh requires 0 <= r_inner < r_outer");
        require(c.space_dim >= 2, "radial space_dim must be at least 2");
        require(one_of(c.gamma, {"inner", "outer"}), "radial gamma must be inner or outer");
    }
    if (c.mode == "planar") {
        require(one_of(c.shape, {"square", "annulus", "disk"}), "planar shape must be square, annulus or disk");
        if (c.shape == "annulus") {
            require(one_of(c.gamma, {"inner", "outer"}), "annulus gamma must be inner or outer");
            require(c.r_inner > 0.0 && c.r_inner < c.r_outer, "annulus requires 0 < r_inner < r_outer");
            require(c.n_radial >= 1 && c.n_angular >= 3, "annulus needs n_radial >= 1 and n_angular >= 3");
        }
        if (c.shape == "square") require(c.n_angular >= 1, "square needs n_angular >= 1 cells per side");
        if (c.shape == "disk") {
            require(one_of(c.gamma, {"robin", "dirichlet"}), "disk gamma must be robin or dirichlet");
            require(c.levels >= 0, "levels must be nonnegative");
        }
    }
    if (c.mode == "file") require(!c.mesh_file.empty(), "mode = file needs mesh_file");
    require_file(c.mesh_file, "mesh_file");

    require(c.p > 1.0 && std::isfinite(c.p), "p must lie in (1, ∞)");
    require(!c.h.empty() || !c.h_file.empty(), "h must be given");
    for (double v : c.h) require(v >= 0.0 && std::isfinite(v), "h must be nonnegative");
    require_file(c.h_file, "h_file");

    require(c.tol_lambda > 0.0 && c.tol_u > 0.0, "solver tolerances must be positive");
    require(c.max_outer >= 1 && c.newton_max_iters >= 1, "iteration limits must be positive");
    require(c.newton_delta_scale > 0.0, "newton_delta_scale must be positive");
    require(c.newton_backtrack > 0.0 && c.newton_backtrack < 1.0, "newton_backtrack must lie in (0, 1)");

    for (double r : c.rho) require(r > 0.0 && std::isfinite(r), "rho must be positive");
    require(!c.rho.empty(), "rho must be given");
    for (size_t i = 0; i < c.epsilons.size(); ++i) {
        require(c.epsilons[i] > 0.0, "epsilons must be positive");
        if (i > 0) require(c.epsilons[i] < c.epsilons[i - 1], "epsilons must be strictly decreasing");
    }
    require(c.layer_cells >= 1, "layer_cells must be at least 1");

    require(c.fd_step > 0.0, "fd_step must be positive");
    for (double t : c.remainder_steps) require(t > 0.0, "remainder_steps must be positive");
    require(c.delta >= 0.0, "delta must be nonnegative");

    require(one_of(c.basis, {"piecewise", "bspline"}), "basis must be piecewise or bspline");
    require(c.k >= 1, "k must be at least 1");
    if (c.basis == "bspline") require(c.degree >= 0 && c.k >= c.degree + 1, "bspline basis needs k >= degree + 1");
    require(c.h_min >= 0.0, "h_min must be nonnegative");
    require(c.h_true.empty() || static_cast<int>(c.h_true.size()) == c.k, "h_true needs k coefficients");
    require(c.init.empty() || static_cast<int>(c.init.size()) == c.k, "init needs k coefficients");
    require(c.init_scale > 0.0, "init_scale must be positive");
    require(c.reg_weight >= 0.0, "reg_weight must be nonnegative");
    for (double w : c.reg_sweep) require(w >= 0.0, "reg_sweep weights must be nonnegative");
    require(c.noise >= 0.0 && c.lambda_noise >= 0.0, "noise levels must be nonnegative");
    require(c.realizations >= 1, "realizations must be at least 1");
    require(c.gn_max_iters >= 1, "gn_max_iters must be at least 1");
    require_file(c.data_file, "data_file");

    for (double r : c.radii) require(r > 0.0, "radii must be positive");
    require(c.M > 0.0, "M must be positive");
    require(c.holdout_every >= 0, "holdout_every must be nonnegative");

    require(one_of(c.kind, {"p1", "pinf", "continuity", "linf", "bv"}), "kind must be p1, pinf, continuity, linf or bv");
    for (double r : c.rho_values) require(r > 0.0, "rho_values must be positive");
    for (double p : c.p_grid) require(p > 1.0 && std::isfinite(p), "p must lie in (1, ∞)");
    require(c.p0 > 1.0, "p must lie in (1, ∞)");
    require(c.grid_points >= 2, "grid_points must be at least 2");

    if (c.subcommand == "derivative-check" || c.subcommand == "reconstruct" || c.subcommand == "stability-probe") {
        require(c.p >= 2.0, c.subcommand + " requires p >= 2");
    }
}

std::string emit_config(const RunConfig& cfg) {
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            if (!section.empty()) out += '\n';
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += f.key + " = " + f.get(cfg) + "\n";
    }
    return out;
}

}  // namespace probin
