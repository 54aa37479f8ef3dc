#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "probin/eigensolver.hpp"

namespace testing_support {

/// Solver settings tight enough that comparisons at the 1e-10 level are not
/// dominated by the stopping rule.
inline probin::EigenSolveSettings tight_settings() {
    probin::EigenSolveSettings s;
    s.tol_lambda = 1e-13;
    s.tol_u = 1e-11;
    s.max_outer = 5000;
    return s;
}

/// A fresh, empty directory below the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("probin_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Random admissible nodal vector: uniform in (0,1) off the fixed nodes.
inline probin::Vector random_admissible(const probin::DiscreteDomain& domain, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    probin::Vector v(domain.num_nodes());
    for (size_t i = 0; i < domain.num_nodes(); ++i) v[i] = domain.is_fixed(i) ? 0.0 : unif(rng);
    return v;
}

}  // namespace testing_support
