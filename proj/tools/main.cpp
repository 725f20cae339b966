#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "nehari/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nehari: two-branch Nehari-manifold solver for the concave-convex "
                 "fractional p-Laplacian"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    bool have_seed = false;
    std::string out_dir;
    bool verbose = false;
    std::string field_source = "random";
    std::string phi_dump;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file")->required();
        cmd->add_option("--seed", seed, "override the config seed")
            ->each([&](const std::string&) { have_seed = true; });
        cmd->add_option("--out", out_dir, "override the output directory");
        cmd->add_flag("--verbose", verbose, "chatty progress output");
    };

    CLI::App* solve = app.add_subcommand("solve", "minimize on both Nehari branches");
    add_common(solve);
    CLI::App* fibering = app.add_subcommand("fibering", "fibering-map report for one field");
    add_common(fibering);
    fibering->add_option("--field", field_source, "field source: random[:SEED] or file:PATH");
    fibering->add_option("--dump-phi", phi_dump, "write a t,phi(t) sample table to this file");
    CLI::App* lambda0 = app.add_subcommand("lambda0", "estimate the two-branch threshold");
    add_common(lambda0);
    CLI::App* validate = app.add_subcommand("validate-kernel", "check kernel admissibility");
    add_common(validate);

    CLI11_PARSE(app, argc, argv);

    nehari::RunConfig config;
    try {
        config = nehari::RunConfig::parse_file(config_path);
        config.apply_env_overrides();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    nehari::CommandOptions opts;
    if (have_seed) opts.seed_override = seed;
    if (!out_dir.empty()) opts.out_override = out_dir;
    opts.verbose = verbose;

    if (solve->parsed()) return nehari::cmd_solve(config, opts, std::cout);
    if (fibering->parsed())
        return nehari::cmd_fibering(config, opts, field_source, phi_dump, std::cout);
    if (lambda0->parsed()) return nehari::cmd_lambda0(config, opts, std::cout);
    if (validate->parsed()) return nehari::cmd_validate_kernel(config, opts, std::cout);
    return 1;
}
