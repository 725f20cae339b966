#include "nehari/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "nehari/rng.hpp"

namespace nehari {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void truncate_negative_part(Field& u) {
    for (double& v : u.values) v = std::max(v, 0.0);
}

bool is_zero(const Field& u) {
    for (double v : u.values)
        if (v != 0.0) return false;
    return true;
}

// Dual norm of the gradient with the radial direction projected out;
// on the Nehari set the radial component already vanishes.
double tangential_residual(const Field& g, const Field& u) {
    const double gu = pairing(g, u);
    const double uu = pairing(u, u);
    Field t = g;
    if (uu > 0.0)
        for (std::size_t i = 0; i < t.size(); ++i) t.values[i] -= (gu / uu) * u.values[i];
    return std::sqrt(pairing(t, t));
}

double negative_part_ratio(const ProblemSpec& spec, const EnergyWeights& w, const Field& u) {
    Field neg(*u.mesh);
    bool any = false;
    for (std::size_t i = 0; i < u.size(); ++i) {
        neg.values[i] = std::max(-u.values[i], 0.0);
        any = any || neg.values[i] > 0.0;
    }
    if (!any) return 0.0;
    const double a = seminorm_p(u, w, spec.p());
    if (!(a > 0.0)) return 0.0;
    return std::pow(seminorm_p(neg, w, spec.p()) / a, 1.0 / spec.p());
}

void fill_diagnostics(const ProblemSpec& spec, const EnergyWeights& w, BranchResult& out) {
    const ReducedIntegrals ri = reduced_integrals(spec, w, out.u);
    const Exponents ex = Exponents::of(spec);
    out.energy = energy(spec, w, out.u);
    out.nehari_residual =
        ri.A > 0.0 ? std::fabs(ri.A - spec.lambda * ri.B - ri.D) / ri.A : 0.0;
    out.phi_second_at_one = ri.A > 0.0 ? phi_second(ri, ex, 1.0) : 0.0;
    out.residual = tangential_residual(gradient(spec, w, out.u), out.u);
    out.negative_part_norm = negative_part_ratio(spec, w, out.u);
}

Field bump_field(const ProblemSpec& spec, Rng& rng) {
    Field u(spec.mesh);
    const Mesh& mesh = spec.mesh;
    const double lx = mesh.hi[0] - mesh.lo[0];
    const double cx = rng.uniform(mesh.lo[0] + 0.15 * lx, mesh.hi[0] - 0.15 * lx);
    const double wx = rng.uniform(0.05, 0.25) * lx;
    double cy = 0.0, wy = 1.0;
    if (mesh.dim == 2) {
        const double ly = mesh.hi[1] - mesh.lo[1];
        cy = rng.uniform(mesh.lo[1] + 0.15 * ly, mesh.hi[1] - 0.15 * ly);
        wy = rng.uniform(0.05, 0.25) * ly;
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double dx = (mesh.node_x(i) - cx) / wx;
        double v = std::exp(-0.5 * dx * dx);
        if (mesh.dim == 2) {
            const double dy = (mesh.node_y(i) - cy) / wy;
            v *= std::exp(-0.5 * dy * dy);
        }
        u.values[i] = v;
    }
    return u;
}

Field eigenlike_field(const ProblemSpec& spec) {
    Field u(spec.mesh);
    const Mesh& mesh = spec.mesh;
    const double pi = 3.141592653589793;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double v = std::sin(pi * (mesh.node_x(i) - mesh.lo[0]) / (mesh.hi[0] - mesh.lo[0]));
        if (mesh.dim == 2)
            v *= std::sin(pi * (mesh.node_y(i) - mesh.lo[1]) / (mesh.hi[1] - mesh.lo[1]));
        u.values[i] = v;
    }
    return u;
}

} // namespace

void SolverConfig::validate() const {
    if (max_outer_iters < 1)
        throw std::invalid_argument("solver: max_outer_iters >= 1 violated");
    if (!(step_initial > 0.0)) throw std::invalid_argument("solver: step_initial > 0 violated");
    if (!(step_shrink > 0.0 && step_shrink < 1.0))
        throw std::invalid_argument("solver: 0 < step_shrink < 1 violated");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
        throw std::invalid_argument("solver: 0 < sufficient_decrease < 1 violated");
    if (!(tol_residual > 0.0)) throw std::invalid_argument("solver: tol_residual > 0 violated");
    if (!(tol_step > 0.0)) throw std::invalid_argument("solver: tol_step > 0 violated");
    if (multistart < 1) throw std::invalid_argument("solver: multistart >= 1 violated");
}

BranchResult minimize_branch(const ProblemSpec& spec, const EnergyWeights& w,
                             const SolverConfig& config, Branch branch, const Field& init) {
    config.validate();
    const auto t0 = Clock::now();
    const Exponents ex = Exponents::of(spec);

    BranchResult out;
    out.u = init;
    if (config.truncate_negative) truncate_negative_part(out.u);
    if (is_zero(out.u)) {
        out.status = BranchStatus::NoBranch;
        out.message = "initial field vanishes (after truncation)";
        out.wall_time_seconds = seconds_since(t0);
        return out;
    }

    // Project the start onto the requested branch.
    try {
        const double t = project(reduced_integrals(spec, w, out.u), ex, branch);
        for (double& v : out.u.values) v *= t;
    } catch (const ProjectionError& e) {
        out.status = BranchStatus::NoBranch;
        out.message = e.what();
        out.wall_time_seconds = seconds_since(t0);
        return out;
    }

    double J = energy(spec, w, out.u);
    out.energy_trace.push_back(J);

    Field w_prev, g_prev;
    bool have_prev = false;
    out.status = BranchStatus::MaxIterations;

    for (int iter = 0; iter < config.max_outer_iters; ++iter) {
        Field g = gradient(spec, w, out.u);
        const double res = tangential_residual(g, out.u);
        if (res <= config.tol_residual) {
            out.status = BranchStatus::Converged;
            out.iterations = iter;
            break;
        }

        // Barzilai-Borwein step when available, safeguarded by Armijo.
        double eta = config.step_initial;
        if (have_prev) {
            double sy = 0.0, ss = 0.0;
            for (std::size_t i = 0; i < out.u.size(); ++i) {
                const double cell = out.u.mesh->cell_measure(i);
                const double si = out.u.values[i] - w_prev.values[i];
                const double yi = g.values[i] - g_prev.values[i];
                sy += cell * si * yi;
                ss += cell * si * si;
            }
            if (sy > 0.0 && std::isfinite(sy) && ss > 0.0)
                eta = std::clamp(ss / sy, 1e-12, 1e12);
        }
        const double gnorm2 = pairing(g, g);

        bool accepted = false;
        Field best_cand;
        double best_J = std::numeric_limits<double>::infinity();
        Field cand;
        double Jc = 0.0;
        for (int ls = 0; ls < 60 && !accepted; ++ls) {
            cand = out.u;
            for (std::size_t i = 0; i < cand.size(); ++i) cand.values[i] -= eta * g.values[i];
            if (config.truncate_negative) truncate_negative_part(cand);
            bool usable = !is_zero(cand);
            if (usable) {
                try {
                    const ReducedIntegrals ric = reduced_integrals(spec, w, cand);
                    if (ric.A > 0.0) {
                        const double t = project(ric, ex, branch);
                        for (double& v : cand.values) v *= t;
                    } else {
                        usable = false;
                    }
                } catch (const ProjectionError&) {
                    usable = false;
                }
            }
            if (usable) {
                Jc = energy(spec, w, cand);
                if (Jc < best_J) {
                    best_J = Jc;
                    best_cand = cand;
                }
                if (Jc <= J - config.sufficient_decrease * eta * gnorm2) {
                    accepted = true;
                    break;
                }
            }
            eta *= config.step_shrink;
        }
        if (!accepted) {
            if (best_J < J) {
                cand = std::move(best_cand);
                Jc = best_J;
            } else {
                out.status = BranchStatus::Stagnated;
                out.iterations = iter;
                out.message = "backtracking underflow: no decreasing step found";
                break;
            }
        }

        double step2 = 0.0, base2 = 0.0;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            const double cell = cand.mesh->cell_measure(i);
            const double d = cand.values[i] - out.u.values[i];
            step2 += cell * d * d;
            base2 += cell * out.u.values[i] * out.u.values[i];
        }

        w_prev = std::move(out.u);
        g_prev = std::move(g);
        have_prev = true;
        out.u = std::move(cand);
        J = Jc;
        out.energy_trace.push_back(J);
        out.iterations = iter + 1;

        if (base2 > 0.0 && std::sqrt(step2 / base2) <= config.tol_step) {
            const double final_res = tangential_residual(gradient(spec, w, out.u), out.u);
            out.status = final_res <= config.tol_residual ? BranchStatus::Converged
                                                          : BranchStatus::Stagnated;
            if (out.status == BranchStatus::Stagnated)
                out.message = "relative step below tolerance before residual target";
            break;
        }
    }

    // Polish: near the minimizer the remaining energy decrease drops below
    // the floating-point resolution of J while the gradient is still
    // computed accurately, so the line search above cannot certify any
    // further progress. Drive the first-order residual down directly with
    // small projected-gradient steps accepted on residual decrease alone
    // (J stays within rounding noise of its floor here).
    if (out.status != BranchStatus::NoBranch) {
        double res = tangential_residual(gradient(spec, w, out.u), out.u);
        double eta = config.step_initial;
        bool improved = true;
        for (int it = 0; it < 400 && res > config.tol_residual * 0.1 && improved; ++it) {
            improved = false;
            const Field g = gradient(spec, w, out.u);
            for (int bt = 0; bt < 40 && !improved; ++bt) {
                Field cand = out.u;
                for (std::size_t i = 0; i < cand.size(); ++i)
                    cand.values[i] -= eta * g.values[i];
                if (config.truncate_negative) truncate_negative_part(cand);
                if (!is_zero(cand)) {
                    try {
                        const ReducedIntegrals ric = reduced_integrals(spec, w, cand);
                        if (ric.A > 0.0) {
                            const double t = project(ric, ex, branch);
                            for (double& v : cand.values) v *= t;
                            const double cand_res =
                                tangential_residual(gradient(spec, w, cand), cand);
                            if (cand_res < res) {
                                out.u = std::move(cand);
                                res = cand_res;
                                improved = true;
                                eta *= 1.3;
                                break;
                            }
                        }
                    } catch (const ProjectionError&) {
                    }
                }
                eta *= 0.5;
            }
        }
        if (res <= config.tol_residual) out.status = BranchStatus::Converged;
    }

    fill_diagnostics(spec, w, out);
    out.wall_time_seconds = seconds_since(t0);
    return out;
}

SolverResult solve_both(const ProblemSpec& spec, const EnergyWeights& w,
                        const SolverConfig& config) {
    config.validate();
    spec.validate();
    const auto t0 = Clock::now();

    const int starts = config.multistart;
    std::vector<Field> inits;
    inits.reserve(starts);
    inits.push_back(eigenlike_field(spec));
    Rng seeder(config.seed);
    for (int k = 1; k < starts; ++k) {
        Rng rng(seeder.derive(static_cast<std::uint64_t>(k)));
        inits.push_back(bump_field(spec, rng));
    }

    std::vector<BranchResult> plus_runs(starts), minus_runs(starts);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int chunks = static_cast<int>(std::min<unsigned>(hw, starts));
    std::vector<std::future<void>> futures;
    for (int c = 0; c < chunks; ++c) {
        futures.push_back(std::async(std::launch::async, [&, c]() {
            for (int k = c; k < starts; k += chunks) {
                plus_runs[k] = minimize_branch(spec, w, config, Branch::Plus, inits[k]);
                minus_runs[k] = minimize_branch(spec, w, config, Branch::Minus, inits[k]);
            }
        }));
    }
    for (auto& f : futures) f.get();

    SolverResult result;
    auto pick_best = [](const std::vector<BranchResult>& runs) {
        int best = -1;
        for (int k = 0; k < static_cast<int>(runs.size()); ++k) {
            if (!runs[k].converged()) continue;
            if (best < 0 || runs[k].energy < runs[best].energy) best = k;
        }
        return best;
    };
    const int bp = pick_best(plus_runs);
    const int bm = pick_best(minus_runs);
    if (bp >= 0) result.plus = plus_runs[bp];
    if (bm >= 0) result.minus = minus_runs[bm];

    const bool plus_ok = bp >= 0;
    const bool minus_ok = bm >= 0;
    if (plus_ok && minus_ok) {
        result.status = SolveStatus::BothConverged;
        Field diff(spec.mesh);
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff.values[i] = result.plus.u.values[i] - result.minus.u.values[i];
        const double denom = std::max(lp_norm(result.plus.u, spec.p()),
                                      lp_norm(result.minus.u, spec.p()));
        result.distinctness = denom > 0.0 ? lp_norm(diff, spec.p()) / denom : 0.0;
    } else if (plus_ok) {
        result.status = SolveStatus::PartialPlus;
        result.minus = minus_runs[0];
    } else if (minus_ok) {
        result.status = SolveStatus::PartialMinus;
        result.plus = plus_runs[0];
    } else {
        bool all_no_branch = true;
        for (int k = 0; k < starts; ++k)
            all_no_branch = all_no_branch &&
                            plus_runs[k].status == BranchStatus::NoBranch &&
                            minus_runs[k].status == BranchStatus::NoBranch;
        result.status = all_no_branch ? SolveStatus::NoNehariPoints : SolveStatus::Failed;
        result.plus = plus_runs[0];
        result.minus = minus_runs[0];
    }

    result.wall_time_seconds = seconds_since(t0);
    return result;
}

Certificate verify_solution(const ProblemSpec& spec, const EnergyWeights& w, const Field& u) {
    if (is_zero(u)) throw std::invalid_argument("verify_solution: zero field");
    Certificate cert;
    const ReducedIntegrals ri = reduced_integrals(spec, w, u);
    const Exponents ex = Exponents::of(spec);
    cert.nehari_residual = std::fabs(ri.A - spec.lambda * ri.B - ri.D) / ri.A;
    cert.dual_residual = std::sqrt(pairing(gradient(spec, w, u), gradient(spec, w, u)));
    cert.phi_second_at_one = phi_second(ri, ex, 1.0);
    cert.negative_part_norm = negative_part_ratio(spec, w, u);
    cert.sign_class = classify(ri);
    cert.lagrange_multiplier_zero =
        std::fabs(cert.phi_second_at_one) > 1e-10 * (ex.p - 1.0) * ri.A;
    return cert;
}

std::string to_string(BranchStatus s) {
    switch (s) {
        case BranchStatus::Converged: return "converged";
        case BranchStatus::Stagnated: return "stagnated";
        case BranchStatus::MaxIterations: return "max_iterations";
        case BranchStatus::NoBranch: return "no_branch";
    }
    return "?";
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::BothConverged: return "both_converged";
        case SolveStatus::PartialPlus: return "partial_plus_only";
        case SolveStatus::PartialMinus: return "partial_minus_only";
        case SolveStatus::NoNehariPoints: return "no_nehari_points";
        case SolveStatus::Failed: return "failed";
    }
    return "?";
}

} // namespace nehari
