// Acceptance suite: eight end-to-end criteria, each printed as one
// [PASS]/[FAIL] line with its measured margin and runtime. Exits 1 on
// the first failure. Tolerances are fixed here, not configurable.
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/rng.hpp"
#include "nehari/run.hpp"
#include "nehari/solver.hpp"
#include "oracles.hpp"

using namespace nehari;

namespace {

#define REQUIRE_MSG(cond, ...)                                        \
    do {                                                              \
        if (!(cond)) {                                                \
            std::printf("[FAIL] ");                                   \
            std::printf(__VA_ARGS__);                                 \
            std::printf("  (%s:%d)\n", __FILE__, __LINE__);           \
            std::exit(1);                                             \
        }                                                             \
    } while (0)

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

ProblemSpec reference_spec(int n_nodes) {
    ProblemSpec spec;
    spec.kernel = KernelSpec::fractional(1, 2.0, 0.5);
    spec.mesh = build_mesh(0.0, 1.0, n_nodes);
    spec.q = 0.5;
    spec.r = 3.0;
    spec.lambda = 1.0;
    spec.h_values.assign(spec.mesh.node_count(), 1.0);
    spec.b_values.assign(spec.mesh.node_count(), 1.0);
    return spec;
}

Field random_field(const Mesh& mesh, std::uint64_t seed, double floor_abs = 0.0) {
    Field u(mesh);
    Rng rng(seed);
    for (double& v : u.values) {
        do {
            v = rng.normal();
        } while (std::fabs(v) < floor_abs);
    }
    return u;
}

// ---- criterion 1: quadrature oracle equivalence ------------------------

void criterion_1() {
    Timer timer;
    const KernelSpec kernel = KernelSpec::fractional(1, 2.0, 0.5);
    double worst = 0.0;
    for (int n : {8, 16, 32}) {
        const Mesh mesh = build_mesh(0.0, 1.0, n);
        const EnergyWeights w = assemble_energy_weights(mesh, kernel);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const Field u = random_field(mesh, seed * 100 + n);
            const double fast = seminorm_p(u, w, 2.0);
            const double dense = oracles::energy_dense_1d(mesh, kernel, u.values, 2.0);
            const double rel = std::fabs(fast - dense) / dense;
            worst = std::max(worst, rel);
            REQUIRE_MSG(rel <= 1e-10,
                        "criterion 1: energy vs dense oracle rel err %.3e > 1e-10 (N=%d)",
                        rel, n);
        }
    }
    const double secs = timer.seconds();
    REQUIRE_MSG(secs < 1.0, "criterion 1: runtime %.2fs >= 1s", secs);
    std::printf("[PASS] criterion 1: quadrature oracle equivalence "
                "(max rel err %.3e, %.2fs)\n", worst, secs);
}

// ---- criterion 2: gradient correctness ---------------------------------

void criterion_2() {
    Timer timer;
    double worst = 0.0;
    for (double p : {2.0, 3.0}) {
        ProblemSpec spec = reference_spec(16);
        spec.kernel = KernelSpec::fractional(1, p, 0.5);
        spec.lambda = 0.3;
        const EnergyWeights w = assemble_energy_weights(spec.mesh, spec.kernel);
        const Field u = random_field(spec.mesh, 21, 1e-3);
        const Field g = gradient(spec, w, u);
        const auto J = [&](const Field& v) { return energy(spec, w, v); };
        for (std::uint64_t dir_seed = 300; dir_seed < 320; ++dir_seed) {
            const Field v = random_field(spec.mesh, dir_seed);
            const double fd = oracles::fd_directional(J, u, v, 1e-6);
            const double an = pairing(g, v);
            const double rel = std::fabs(fd - an) / std::max(1.0, std::fabs(an));
            worst = std::max(worst, rel);
            REQUIRE_MSG(rel <= 1e-5,
                        "criterion 2: FD vs analytic gradient rel err %.3e > 1e-5 (p=%g)",
                        rel, p);
        }
    }
    const double secs = timer.seconds();
    REQUIRE_MSG(secs < 5.0, "criterion 2: runtime %.2fs >= 5s", secs);
    std::printf("[PASS] criterion 2: gradient correctness "
                "(max rel err %.3e, %.2fs)\n", worst, secs);
}

// ---- criteria 3-5 share the reference problem and lambda0 --------------

struct Reference {
    ProblemSpec spec;
    EnergyWeights weights;
    Lambda0Estimate estimate;
};

Reference make_reference(int n_nodes) {
    Reference ref;
    ref.spec = reference_spec(n_nodes);
    ref.weights = assemble_energy_weights(ref.spec.mesh, ref.spec.kernel);
    ref.estimate = estimate_lambda0(ref.spec, ref.weights, SamplerConfig{64, 200, 42});
    REQUIRE_MSG(ref.estimate.ok, "reference lambda0 estimate failed: %s",
                ref.estimate.failure_reason.c_str());
    ref.spec.lambda = ref.estimate.lambda0 / 2.0;
    return ref;
}

void criterion_3(const Reference& ref) {
    Timer timer;
    const Exponents ex = Exponents::of(ref.spec);
    Rng rng(9001);
    auto magnitude = [&]() { return std::exp(rng.uniform(std::log(1e-3), std::log(1e3))); };

    for (int trial = 0; trial < 500; ++trial) {
        // Case 1: B < 0, D < 0 -> no roots
        const ReducedIntegrals c1{magnitude(), -magnitude(), -magnitude()};
        REQUIRE_MSG(critical_points(c1, ex).roots.empty(),
                    "criterion 3: case 1 produced a root (trial %d)", trial);

        // Case 2: B < 0, D > 0 -> exactly one Max
        const ReducedIntegrals c2{magnitude(), -magnitude(), magnitude()};
        const FiberingReport r2 = critical_points(c2, ex);
        REQUIRE_MSG(r2.roots.size() == 1 && r2.roots[0].kind == RootKind::Max,
                    "criterion 3: case 2 root count/kind wrong (trial %d)", trial);
        REQUIRE_MSG(std::fabs(phi_prime(c2, ex, r2.roots[0].t)) <=
                        1e-12 * phi_prime_scale(c2, ex, r2.roots[0].t),
                    "criterion 3: case 2 root residual too large (trial %d)", trial);

        // Case 3: B > 0, D < 0 -> exactly one Min
        const ReducedIntegrals c3{magnitude(), magnitude(), -magnitude()};
        const FiberingReport r3 = critical_points(c3, ex);
        REQUIRE_MSG(r3.roots.size() == 1 && r3.roots[0].kind == RootKind::Min,
                    "criterion 3: case 3 root count/kind wrong (trial %d)", trial);
        REQUIRE_MSG(std::fabs(phi_prime(c3, ex, r3.roots[0].t)) <=
                        1e-12 * phi_prime_scale(c3, ex, r3.roots[0].t),
                    "criterion 3: case 3 root residual too large (trial %d)", trial);
    }

    // Case 4 triples come from fields of the reference problem, where
    // lambda < lambda0 certifies the two-root structure.
    for (int trial = 0; trial < 500; ++trial) {
        const Field u = random_field(ref.spec.mesh, 5000 + trial);
        const ReducedIntegrals ri = reduced_integrals(ref.spec, ref.weights, u);
        REQUIRE_MSG(ri.B > 0.0 && ri.D > 0.0, "criterion 3: sample not in H+ cap B+");
        const FiberingReport rep = critical_points(ri, ex);
        REQUIRE_MSG(rep.roots.size() == 2, "criterion 3: case 4 expected 2 roots, got %zu",
                    rep.roots.size());
        REQUIRE_MSG(rep.roots[0].kind == RootKind::Min && rep.roots[1].kind == RootKind::Max,
                    "criterion 3: case 4 kinds wrong (trial %d)", trial);
        const double that = m_u_argmax(ri, ex);
        REQUIRE_MSG(rep.roots[0].t < that && that < rep.roots[1].t,
                    "criterion 3: case 4 ordering t1 < t_hat < t2 violated (trial %d)", trial);
        for (const FiberingRoot& root : rep.roots)
            REQUIRE_MSG(std::fabs(phi_prime(ri, ex, root.t)) <=
                            1e-12 * phi_prime_scale(ri, ex, root.t),
                        "criterion 3: case 4 root residual too large (trial %d)", trial);
    }
    const double secs = timer.seconds();
    REQUIRE_MSG(secs < 10.0, "criterion 3: runtime %.2fs >= 10s", secs);
    std::printf("[PASS] criterion 3: fibering case table, 500 triples/case "
                "(lambda = %.4g, %.2fs)\n", ex.lambda, secs);
}

void criterion_4(const Reference& ref) {
    Timer timer;
    const Exponents ex = Exponents::of(ref.spec);
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 200; ++trial) {
        const Field u = random_field(ref.spec.mesh, 9000 + trial);
        const ReducedIntegrals ri = reduced_integrals(ref.spec, ref.weights, u);
        REQUIRE_MSG(ri.B > 0.0 && ri.D > 0.0, "criterion 4: sample not in H+ cap B+");
        const TStar ts = t_star_and_delta(ri, ex);
        const double value = phi(ri, ex, ts.t);
        worst = std::min(worst, value);
        REQUIRE_MSG(value > 0.0, "criterion 4: phi(t*) = %.6g <= 0 (trial %d)", value, trial);
    }
    std::printf("[PASS] criterion 4: phi(t*) > 0 on 200 samples at lambda0/2 "
                "(min value %.4g, %.2fs)\n", worst, timer.seconds());
}

void criterion_5(const Reference& ref) {
    Timer timer;
    const Exponents ex = Exponents::of(ref.spec);
    const double delta1 = ref.estimate.delta1(ref.spec.lambda);
    REQUIRE_MSG(delta1 > 0.0, "criterion 5: delta1 = %.6g not positive", delta1);
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 200; ++trial) {
        const Field u = random_field(ref.spec.mesh, 13000 + trial);
        const ReducedIntegrals ri = reduced_integrals(ref.spec, ref.weights, u);
        const double t2 = project(ri, ex, Branch::Minus);
        const double value = phi(ri, ex, t2);
        worst = std::min(worst, value);
        REQUIRE_MSG(value >= delta1 * (1.0 - 1e-12),
                    "criterion 5: phi(t2) = %.6g < delta1 = %.6g (trial %d)", value, delta1,
                    trial);
    }
    std::printf("[PASS] criterion 5: Max-branch energies >= delta1 = %.4g "
                "(min phi(t2) %.4g, %.2fs)\n", delta1, worst, timer.seconds());
}

// ---- criterion 6: the two solutions at desk scale ----------------------

void criterion_6() {
    Timer timer;
    Reference ref = make_reference(64);
    SolverConfig cfg;
    const SolverResult res = solve_both(ref.spec, ref.weights, cfg);
    REQUIRE_MSG(res.status == SolveStatus::BothConverged,
                "criterion 6: reference solve status %s", to_string(res.status).c_str());
    REQUIRE_MSG(res.plus.energy < 0.0, "criterion 6: J(u_plus) = %.6g not negative",
                res.plus.energy);
    REQUIRE_MSG(res.minus.energy > 0.0, "criterion 6: J(u_minus) = %.6g not positive",
                res.minus.energy);
    REQUIRE_MSG(res.plus.residual <= 1e-8 && res.minus.residual <= 1e-8,
                "criterion 6: dual residuals %.3e / %.3e > 1e-8", res.plus.residual,
                res.minus.residual);
    REQUIRE_MSG(res.distinctness > 1e-3, "criterion 6: distinctness %.3e <= 1e-3",
                res.distinctness);
    REQUIRE_MSG(res.plus.negative_part_norm <= 1e-8 &&
                    res.minus.negative_part_norm <= 1e-8,
                "criterion 6: negative parts %.3e / %.3e > 1e-8",
                res.plus.negative_part_norm, res.minus.negative_part_norm);

    // sign-changing weight variant: both branches must converge for at
    // least one seeded start
    ProblemSpec sc = reference_spec(64);
    for (std::size_t i = 0; i < sc.mesh.node_count(); ++i)
        sc.h_values[i] = std::cos(3.141592653589793 * sc.mesh.node_x(i));
    const EnergyWeights wsc = assemble_energy_weights(sc.mesh, sc.kernel);
    const Lambda0Estimate est_sc = estimate_lambda0(sc, wsc, SamplerConfig{64, 200, 42});
    REQUIRE_MSG(est_sc.ok, "criterion 6: sign-changing lambda0 estimate failed");
    sc.lambda = est_sc.lambda0 / 2.0;
    const SolverResult res_sc = solve_both(sc, wsc, cfg);
    REQUIRE_MSG(res_sc.status == SolveStatus::BothConverged,
                "criterion 6: sign-changing variant status %s",
                to_string(res_sc.status).c_str());

    const double secs = timer.seconds();
    REQUIRE_MSG(secs < 60.0, "criterion 6: runtime %.2fs >= 60s", secs);
    std::printf("[PASS] criterion 6: two non-negative solutions at N=64 "
                "(J+ = %.4g, J- = %.4g, distinctness %.3g, %.2fs)\n",
                res.plus.energy, res.minus.energy, res.distinctness, secs);
}

// ---- criterion 7: homogeneity and Euler identities ---------------------

void criterion_7() {
    Timer timer;
    ProblemSpec spec = reference_spec(16);
    spec.lambda = 0.7;
    const EnergyWeights w = assemble_energy_weights(spec.mesh, spec.kernel);
    const Exponents ex = Exponents::of(spec);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Field u = random_field(spec.mesh, 17000 + trial);
        const ReducedIntegrals ri = reduced_integrals(spec, w, u);
        const double scale =
            std::max({ri.A, std::fabs(spec.lambda * ri.B), std::fabs(ri.D), 1.0});

        for (double t : {0.5, 1.0, 2.0, 5.0}) {
            Field tu = u;
            for (double& v : tu.values) v *= t;
            const double lhs = energy(spec, w, tu);
            const double poly = std::pow(t, ex.p) * ri.A / ex.p -
                                ex.lambda * std::pow(t, ex.q + 1.0) * ri.B / (ex.q + 1.0) -
                                std::pow(t, ex.r + 1.0) * ri.D / (ex.r + 1.0);
            const double rel =
                std::fabs(lhs - poly) / std::max(1.0, std::fabs(poly));
            worst = std::max(worst, rel);
            REQUIRE_MSG(rel <= 1e-12,
                        "criterion 7: homogeneity rel err %.3e > 1e-12 (t=%g)", rel, t);
        }

        const double euler = pairing(gradient(spec, w, u), u);
        const double rhs = ri.A - spec.lambda * ri.B - ri.D;
        const double rel = std::fabs(euler - rhs) / scale;
        worst = std::max(worst, rel);
        REQUIRE_MSG(rel <= 1e-12, "criterion 7: Euler identity rel err %.3e > 1e-12", rel);
    }
    std::printf("[PASS] criterion 7: homogeneity + Euler identities, 100 cases "
                "(max rel err %.3e, %.2fs)\n", worst, timer.seconds());
}

// ---- criterion 8: byte-level determinism of solve ----------------------

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE_MSG(in.good(), "criterion 8: missing %s", p.string().c_str());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void criterion_8() {
    Timer timer;
    const char* text = R"(
seed = 42
[problem]
dim = 1
domain = 0 1
nodes = 64
p = 2
alpha = 0.5
theta = 1
kernel = fractional
q = 0.5
r = 3
lambda = auto
lambda_fraction = 0.5
h = "1"
b = "1"
[solver]
multistart = 8
[output]
formats = csv json
)";
    RunConfig cfg = RunConfig::parse_text(text);
    const auto base = std::filesystem::temp_directory_path() /
                      ("nehari_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(base);
    std::ostringstream log;

    cfg.out_dir = (base / "run1").string();
    REQUIRE_MSG(cmd_solve(cfg, {}, log) == 0, "criterion 8: first solve failed");
    cfg.out_dir = (base / "run2").string();
    REQUIRE_MSG(cmd_solve(cfg, {}, log) == 0, "criterion 8: second solve failed");

    const std::string a = slurp(base / "run1" / "result.json");
    const std::string b = slurp(base / "run2" / "result.json");
    REQUIRE_MSG(a == b, "criterion 8: result.json differs between identical runs");
    REQUIRE_MSG(slurp(base / "run1" / "u_plus.csv") == slurp(base / "run2" / "u_plus.csv"),
                "criterion 8: u_plus.csv differs between identical runs");
    std::filesystem::remove_all(base);
    std::printf("[PASS] criterion 8: identical config+seed gives byte-identical "
                "result.json (%.2fs)\n", timer.seconds());
}

} // namespace

int main() {
    std::printf("acceptance: concave-convex fractional p-Laplacian Nehari solver\n");
    criterion_1();
    criterion_2();
    Reference ref = make_reference(64);
    criterion_3(ref);
    criterion_4(ref);
    criterion_5(ref);
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("acceptance: all 8 criteria passed\n");
    return 0;
}
