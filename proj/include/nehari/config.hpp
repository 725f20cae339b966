#ifndef NEHARI_CONFIG_HPP
#define NEHARI_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nehari/functional.hpp"
#include "nehari/solver.hpp"

namespace nehari {

/// Parsed run configuration. Flat sectioned key = value text:
///
///   seed = 42
///   [problem]
///   dim = 1
///   domain = 0 1            # 2D: ax bx ay by
///   nodes = 64              # per axis
///   p = 2
///   alpha = 0.5
///   theta = 1
///   kernel = fractional     # fractional | scaled_fractional
///   multiplier = 1          # scaled_fractional only
///   q = 0.5
///   r = 3
///   lambda = 0.05           # or: lambda = auto   with lambda_fraction
///   lambda_fraction = 0.5   # lambda = fraction * lambda0 estimate
///   h = "1"
///   b = "1"
///   [solver]
///   max_outer_iters = 5000
///   ...
///   [output]
///   dir = out
///   formats = csv json
///
/// Any key can be overridden by an environment variable
/// NEHARI_<SECTION>_<KEY> (NEHARI_SEED for the top-level seed).
struct RunConfig {
    // problem
    int dim = 1;
    double ax = 0.0, bx = 1.0, ay = 0.0, by = 1.0;
    int nodes = 64;
    double p = 2.0, alpha = 0.5, theta = 1.0;
    std::string kernel_family = "fractional";
    double multiplier = 1.0;
    double q = 0.5, r = 3.0;
    bool lambda_auto = false;       // lambda from the lambda0 estimate
    double lambda = 0.0;            // explicit value when !lambda_auto
    double lambda_fraction = 0.5;   // used when lambda_auto
    std::string h_expr = "1";
    std::string b_expr = "1";

    // solver
    SolverConfig solver;

    // output
    std::string out_dir = "out";
    bool write_csv = true;
    bool write_json = true;
    int verbosity = 0;

    std::uint64_t seed = 42;

    std::string raw_text;  // config echo (original file content)

    static RunConfig parse_file(const std::filesystem::path& path);
    static RunConfig parse_text(const std::string& text);

    /// Applies NEHARI_* environment overrides on top of parsed values.
    void apply_env_overrides();

    /// Revalidates all problem constraints; throws std::invalid_argument
    /// with the violated inequality spelled out.
    void validate() const;

    KernelSpec build_kernel() const;
    /// Builds mesh, samples h and b at the nodes, validates.
    ProblemSpec build_problem() const;
};

} // namespace nehari

#endif
