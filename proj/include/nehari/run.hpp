#ifndef NEHARI_RUN_HPP
#define NEHARI_RUN_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "nehari/config.hpp"

namespace nehari {

/// Subcommand entry points shared by the CLI binary and the tests.
/// Exit codes: 0 full success, 1 configuration/input error, 2 partial
/// result (branch failure, estimation failure, kernel inadmissible).

struct CommandOptions {
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;
    bool verbose = false;
};

/// Writes u_plus.csv, u_minus.csv and result.json into the output
/// directory; result.json is byte-deterministic for a fixed config+seed.
int cmd_solve(const RunConfig& config, const CommandOptions& opts, std::ostream& out);

/// Field source for the fibering report: "random" / "random:SEED" or
/// "file:PATH" (CSV as written by cmd_solve).
int cmd_fibering(const RunConfig& config, const CommandOptions& opts,
                 const std::string& field_source, const std::string& phi_dump_path,
                 std::ostream& out);

int cmd_lambda0(const RunConfig& config, const CommandOptions& opts, std::ostream& out);

int cmd_validate_kernel(const RunConfig& config, const CommandOptions& opts,
                        std::ostream& out);

/// Shortest round-trip decimal representation (17 significant digits max).
std::string format_double(double x);

/// Reads a field from a CSV dump (coordinates + value columns).
Field read_field_csv(const std::filesystem::path& path, const Mesh& mesh);

} // namespace nehari

#endif
