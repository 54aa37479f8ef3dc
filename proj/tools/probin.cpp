// Command-line front end: probin <subcommand> [--config FILE] [--out DIR]
// [--seed N] [--threads N] [--set section.key=value ...]

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "probin/config.hpp"
#include "probin/errors.hpp"
#include "probin/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"p-Laplacian Robin eigenvalue laboratory"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "Configuration file (key = value with [sections])")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--threads", threads, "Worker threads (PROBIN_THREADS overrides)")->check(CLI::PositiveNumber);
    app.add_option("--set", overrides, "Override a config key, e.g. --set problem.p=3");
    app.fallthrough();

    for (const auto& name : probin::subcommands()) app.add_subcommand(name, "run " + name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : probin::kExitConfigError;
    }

    const std::string subcommand = app.get_subcommands().front()->get_name();
    try {
        probin::RunConfig cfg;
        if (!config_path.empty()) cfg = probin::parse_config_file(config_path);
        cfg.subcommand = subcommand;
        for (const auto& o : overrides) probin::apply_override(cfg, o);
        if (out_dir) cfg.out = *out_dir;
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        probin::validate_config(cfg);
        return probin::run(cfg, std::cerr);
    } catch (const probin::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (out_dir) probin::write_failure_manifest(*out_dir, e.code(), e.what());
        return probin::exit_code_for(e.code());
    }
}
