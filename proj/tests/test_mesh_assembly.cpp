#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nehari/assembly.hpp"
#include "nehari/rng.hpp"
#include "oracles.hpp"

using namespace nehari;

namespace {

Field random_field(const Mesh& mesh, std::uint64_t seed) {
    Field u(mesh);
    Rng rng(seed);
    for (double& v : u.values) v = rng.normal();
    return u;
}

} // namespace

TEST_CASE("1D mesh nodes and measures") {
    const Mesh m = build_mesh(0.0, 1.0, 3);
    REQUIRE(m.node_count() == 3);
    CHECK(m.node_x(0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(m.node_x(1) == doctest::Approx(0.50).epsilon(1e-15));
    CHECK(m.node_x(2) == doctest::Approx(0.75).epsilon(1e-15));
    // boundary cells absorb the half-cells next to the boundary
    CHECK(m.cell_measure(0) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(m.cell_measure(1) == doctest::Approx(0.250).epsilon(1e-15));
    CHECK(m.cell_measure(2) == doctest::Approx(0.375).epsilon(1e-15));

    double total = 0.0;
    for (std::size_t i = 0; i < m.node_count(); ++i) total += m.cell_measure(i);
    CHECK(total == doctest::Approx(m.volume()).epsilon(1e-12));

    const Mesh m2 = build_mesh(0.0, 1.0, 2);
    CHECK(m2.node_x(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(m2.node_x(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("mesh construction errors") {
    CHECK_THROWS_WITH_AS(build_mesh(0.0, 1.0, 1), doctest::Contains("N >= 2"),
                         std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(1.0, 1.0, 4), std::invalid_argument);
}

TEST_CASE("2D mesh: 16 nodes, measures tile the square") {
    const Mesh m = build_mesh(0.0, 1.0, 0.0, 1.0, 4);
    REQUIRE(m.node_count() == 16);
    double total = 0.0;
    for (std::size_t i = 0; i < m.node_count(); ++i) total += m.cell_measure(i);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("1D exterior weight: analytic value and quadrature cross-check") {
    const KernelSpec k = KernelSpec::fractional(1, 2.0, 0.5);
    const Mesh m = build_mesh(0.0, 1.0, 3);
    const EnergyWeights w = assemble_energy_weights(m, k);

    // node x = 0.5: 2/(p alpha) * (0.5^{-1} + 0.5^{-1}) = 8, times the cell
    CHECK(w.exterior[1] == doctest::Approx(8.0 * m.cell_measure(1)).epsilon(1e-13));

    // cross-check against a literal quadrature of 2 int_{COmega} K(x-y) dy:
    // substitute y -> x + t so each side is int_d^inf t^{-(1+pa)} dt,
    // integrated numerically to a far cutoff plus the exact remainder.
    const double x = m.node_x(1);
    const double far = 1e6;
    const auto kern = [&](double t) { return eval_kernel(k, t); };
    const double left = oracles::quad(kern, x - 0.0, far, 1e-12) + eval_kernel(k, far) * far;
    const double right = oracles::quad(kern, 1.0 - x, far, 1e-12) + eval_kernel(k, far) * far;
    CHECK(w.exterior[1] == doctest::Approx(2.0 * (left + right) * m.cell_measure(1))
                               .epsilon(1e-7));
}

TEST_CASE("zero field has zero energy") {
    const KernelSpec k = KernelSpec::fractional(1, 2.0, 0.5);
    const Mesh m = build_mesh(0.0, 1.0, 8);
    const EnergyWeights w = assemble_energy_weights(m, k);
    const Field u(m);
    CHECK(seminorm_p(u, w, 2.0) == 0.0);
}

TEST_CASE("seminorm matches the dense double-sum oracle (1D)") {
    const KernelSpec k = KernelSpec::fractional(1, 2.0, 0.5);
    const Mesh m = build_mesh(0.0, 1.0, 8);
    const EnergyWeights w = assemble_energy_weights(m, k);
    const Field u = random_field(m, 7);
    const double fast = seminorm_p(u, w, 2.0);
    const double dense = oracles::energy_dense_1d(m, k, u.values, 2.0);
    CHECK(fast == doctest::Approx(dense).epsilon(1e-10));
}

TEST_CASE("seminorm matches the dense oracle for p = 3") {
    const KernelSpec k = KernelSpec::fractional(1, 3.0, 0.3);
    const Mesh m = build_mesh(-1.0, 2.0, 10);
    const EnergyWeights w = assemble_energy_weights(m, k);
    const Field u = random_field(m, 11);
    CHECK(seminorm_p(u, w, 3.0) ==
          doctest::Approx(oracles::energy_dense_1d(m, k, u.values, 3.0)).epsilon(1e-10));
}

TEST_CASE("2D pair weights match the oracle recomputation") {
    const KernelSpec k = KernelSpec::fractional(2, 2.0, 0.4);
    const Mesh m = build_mesh(0.0, 1.0, 0.0, 1.0, 4);
    const EnergyWeights w = assemble_energy_weights(m, k);
    for (std::size_t i = 0; i < m.node_count(); ++i)
        for (std::size_t j = i + 1; j < m.node_count(); ++j)
            CHECK(w.pair_weight(i, j) ==
                  doctest::Approx(oracles::pair_quadrature_weight(m, k, i, j)).epsilon(1e-12));
}

TEST_CASE("p-homogeneity of the seminorm") {
    const KernelSpec k = KernelSpec::fractional(1, 2.0, 0.5);
    const Mesh m = build_mesh(0.0, 1.0, 16);
    const EnergyWeights w = assemble_energy_weights(m, k);
    const Field u = random_field(m, 3);
    const double base = seminorm_p(u, w, 2.0);
    for (double c : {0.5, 2.0, 5.0}) {
        Field v = u;
        for (double& x : v.values) x *= c;
        CHECK(seminorm_p(v, w, 2.0) ==
              doctest::Approx(std::pow(c, 2.0) * base).epsilon(1e-13));
    }
}

TEST_CASE("lp norm values and oracle") {
    const Mesh m = build_mesh(0.0, 1.0, 16);
    Field ones(m);
    for (double& v : ones.values) v = 1.0;
    CHECK(lp_norm(ones, 2.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(lp_norm(Field(m), 2.0) == 0.0);
    CHECK_THROWS_AS(lp_norm(ones, 0.5), std::domain_error);

    const Field u = random_field(m, 5);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        acc += m.cell_measure(i) * std::pow(std::fabs(u.values[i]), 1.5);
    CHECK(lp_norm(u, 1.5) == doctest::Approx(std::pow(acc, 1.0 / 1.5)).epsilon(1e-13));
}

TEST_CASE("operator duality: pairing(Lu, u) equals the seminorm") {
    for (double p : {2.0, 3.0}) {
        const KernelSpec k = KernelSpec::fractional(1, p, 0.4);
        const Mesh m = build_mesh(0.0, 1.0, 8);
        const EnergyWeights w = assemble_energy_weights(m, k);
        const Field u = random_field(m, 13);
        const Field lu = apply_operator(u, w, p);
        CHECK(pairing(lu, u) == doctest::Approx(seminorm_p(u, w, p)).epsilon(1e-10));
    }
}

TEST_CASE("operator on a spike is positive at the spike") {
    const KernelSpec k = KernelSpec::fractional(1, 2.0, 0.5);
    const Mesh m = build_mesh(0.0, 1.0, 9);
    const EnergyWeights w = assemble_energy_weights(m, k);
    Field u(m);
    u.values[4] = 1.0;
    const Field lu = apply_operator(u, w, 2.0);
    CHECK(lu.values[4] > 0.0);
    CHECK(apply_operator(Field(m), w, 2.0).values[0] == 0.0);
}

TEST_CASE("mismatched mesh is a usage error") {
    const KernelSpec k = KernelSpec::fractional(1, 2.0, 0.5);
    const Mesh m1 = build_mesh(0.0, 1.0, 8);
    const Mesh m2 = build_mesh(0.0, 2.0, 8);   // different domain
    const Mesh m3 = build_mesh(0.0, 1.0, 10);  // different node count
    const EnergyWeights w = assemble_energy_weights(m1, k);
    CHECK_THROWS_AS(seminorm_p(Field(m2), w, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_operator(Field(m3), w, 2.0), std::invalid_argument);
    // a structurally identical mesh is the same discretization
    const Mesh m4 = build_mesh(0.0, 1.0, 8);
    CHECK_NOTHROW(seminorm_p(Field(m4), w, 2.0));
}

TEST_CASE("interior pair weights are translation invariant (fractional)") {
    const KernelSpec k = KernelSpec::fractional(1, 2.0, 0.5);
    const Mesh m = build_mesh(0.0, 1.0, 16);
    const EnergyWeights w = assemble_energy_weights(m, k);
    // pairs strictly inside (no boundary cells), same index gap
    for (std::size_t gap : {1u, 2u, 5u}) {
        const double ref = w.pair_weight(3, 3 + gap);
        for (std::size_t i = 4; i + gap + 1 < m.node_count(); ++i)
            CHECK(w.pair_weight(i, i + gap) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("discrete norm equivalence constant is finite and > 1") {
    const KernelSpec k = KernelSpec::fractional(1, 2.0, 0.5);
    const Mesh m = build_mesh(0.0, 1.0, 16);
    const EnergyWeights w = assemble_energy_weights(m, k);
    double c_disc = 1.0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const Field u = random_field(m, seed);
        const double a = seminorm_p(u, w, 2.0);
        REQUIRE(a > 0.0);
        const double x_norm_p = std::pow(lp_norm(u, 2.0) + std::pow(a, 0.5), 2.0);
        CHECK(a <= x_norm_p);
        c_disc = std::max(c_disc, x_norm_p / a);
    }
    CHECK(c_disc > 1.0);
    CHECK(std::isfinite(c_disc));
}

TEST_CASE("2D exterior weight matches the polar-integral oracle") {
    const KernelSpec k = KernelSpec::fractional(2, 2.0, 0.4);
    const Mesh m = build_mesh(0.0, 1.0, 0.0, 1.0, 5);
    const EnergyWeights w = assemble_energy_weights(m, k);
    const double pa = 0.8;
    const double twopi = 2.0 * 3.141592653589793;
    for (std::size_t i : {std::size_t{0}, std::size_t{7}, std::size_t{12}, std::size_t{24}}) {
        const double x = m.node_x(i), y = m.node_y(i);
        const auto dphi = [&](double phi) {
            const double c = std::cos(phi), s = std::sin(phi);
            double t = 1e300;
            if (c > 1e-14) t = std::min(t, (1.0 - x) / c);
            if (c < -1e-14) t = std::min(t, (0.0 - x) / c);
            if (s > 1e-14) t = std::min(t, (1.0 - y) / s);
            if (s < -1e-14) t = std::min(t, (0.0 - y) / s);
            return std::pow(t, -pa) / pa;
        };
        // dense composite midpoint rule; an adaptive rule is unreliable
        // here (the centre-node integrand is pi/2-periodic and fools the
        // early-termination test)
        const long panels = 2'000'000;
        double acc = 0.0;
        for (long kk = 0; kk < panels; ++kk) acc += dphi(twopi * (kk + 0.5) / panels);
        const double oracle = 2.0 * acc * (twopi / panels) * m.cell_measure(i);
        CHECK(w.exterior[i] == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("2D duality identity") {
    const KernelSpec k = KernelSpec::fractional(2, 2.0, 0.4);
    const Mesh m = build_mesh(0.0, 1.0, 0.0, 1.0, 6);
    const EnergyWeights w = assemble_energy_weights(m, k);
    const Field u = random_field(m, 3);
    CHECK(pairing(apply_operator(u, w, 2.0), u) ==
          doctest::Approx(seminorm_p(u, w, 2.0)).epsilon(1e-12));
}

TEST_CASE("discrete Sobolev ratio is stable under refinement") {
    const KernelSpec k = KernelSpec::fractional(1, 2.0, 0.5);
    for (double mexp : {1.5, 2.0, 4.0}) {
        double prev = 0.0;
        for (int n : {16, 32, 64}) {
            const Mesh m = build_mesh(0.0, 1.0, n);
            const EnergyWeights w = assemble_energy_weights(m, k);
            double worst = 0.0;
            for (std::uint64_t seed = 1; seed <= 20; ++seed) {
                const Field u = random_field(m, seed);
                worst = std::max(worst,
                                 std::pow(lp_norm(u, mexp), 2.0) / seminorm_p(u, w, 2.0));
            }
            if (prev > 0.0) CHECK(worst <= 4.0 * prev);  // no blow-up at desk scale
            prev = worst;
        }
    }
}
