#pragma once

#include <iosfwd>
#include <string>

#include "probin/config.hpp"
#include "probin/domain.hpp"
#include "probin/eigensolver.hpp"
#include "probin/robin_field.hpp"

namespace probin {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitNoConvergence = 2, kExitConfigError = 3 };

int exit_code_for(ErrorCode code);

DiscreteDomain build_domain(const RunConfig& cfg);
/// [problem] h on the Robin faces of `domain` (constant, list or file).
RobinField build_h(const RunConfig& cfg, const DiscreteDomain& domain);
EigenSolveSettings build_settings(const RunConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Runs the configured subcommand, writing its CSVs, `resolved_config` and
/// `manifest.json` into cfg.out. Returns the process exit code; errors are
/// recorded in the manifest rather than thrown.
int run(const RunConfig& cfg, std::ostream& log);

/// Writes a manifest for a run that failed before a config was resolved.
void write_failure_manifest(const std::string& out_dir, ErrorCode code, const std::string& message);

}  // namespace probin
