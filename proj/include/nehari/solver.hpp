#ifndef NEHARI_SOLVER_HPP
#define NEHARI_SOLVER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nehari/fibering.hpp"
#include "nehari/functional.hpp"

namespace nehari {

struct SolverConfig {
    int max_outer_iters = 5000;
    double step_initial = 1.0;         // backtracking start
    double step_shrink = 0.5;
    double sufficient_decrease = 1e-4; // Armijo constant
    double tol_residual = 1e-9;        // dual-norm residual
    double tol_step = 1e-13;           // relative step
    int multistart = 8;
    std::uint64_t seed = 42;
    bool truncate_negative = true;
    bool verbose = false;

    void validate() const;
};

enum class BranchStatus { Converged, Stagnated, MaxIterations, NoBranch };
std::string to_string(BranchStatus s);

struct BranchResult {
    BranchStatus status = BranchStatus::NoBranch;
    Field u;
    double energy = 0.0;
    double residual = 0.0;          // dual norm of the tangential gradient
    double nehari_residual = 0.0;   // |A - lambda B - D| / A
    double phi_second_at_one = 0.0;
    double negative_part_norm = 0.0;  // ||u-||_{X0} / ||u||_{X0}
    int iterations = 0;
    double wall_time_seconds = 0.0;
    std::vector<double> energy_trace;  // accepted outer iterates
    std::string message;

    bool converged() const { return status == BranchStatus::Converged; }
};

enum class SolveStatus { BothConverged, PartialPlus, PartialMinus, NoNehariPoints, Failed };
std::string to_string(SolveStatus s);

struct SolverResult {
    BranchResult plus;
    BranchResult minus;
    SolveStatus status = SolveStatus::Failed;
    double distinctness = 0.0;  // relative L^p distance between branches
    double wall_time_seconds = 0.0;
};

/// Projected descent on one Nehari branch: descend along -grad J,
/// truncate negatives (the f+ device keeping iterates in the positive
/// cone), re-project onto the branch root of the fibering map, with
/// Armijo backtracking keeping J non-increasing. Stops on the dual
/// residual or the relative step. Throws nothing; branch absence and
/// stagnation are reported through the status.
BranchResult minimize_branch(const ProblemSpec& spec, const EnergyWeights& w,
                             const SolverConfig& config, Branch branch, const Field& init);

/// Multistart driver producing the two solutions: random positive bumps
/// plus a first-eigenfunction-like profile, best energy per branch.
/// Starts run concurrently; the reduction is deterministic in seed order.
SolverResult solve_both(const ProblemSpec& spec, const EnergyWeights& w,
                        const SolverConfig& config);

/// Criticality certificate for an arbitrary field: Nehari residual,
/// dual gradient norm, phi''(1) (nonzero means the Lagrange multiplier
/// vanishes and the point is an unconstrained critical point), and the
/// non-negativity violation.
struct Certificate {
    double nehari_residual = 0.0;
    double dual_residual = 0.0;
    double phi_second_at_one = 0.0;
    double negative_part_norm = 0.0;
    SignClass sign_class;
    bool lagrange_multiplier_zero = false;
};

Certificate verify_solution(const ProblemSpec& spec, const EnergyWeights& w, const Field& u);

} // namespace nehari

#endif
