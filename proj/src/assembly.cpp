#include "nehari/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nehari/quadrature.hpp"

namespace nehari {

namespace {

constexpr double kPi = 3.141592653589793;

struct AxisCells {
    std::vector<double> left, right;
};

AxisCells axis_cells(const std::vector<double>& nodes, double a, double b) {
    AxisCells c;
    const std::size_t n = nodes.size();
    c.left.resize(n);
    c.right.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.left[i] = (i == 0) ? a : 0.5 * (nodes[i - 1] + nodes[i]);
        c.right[i] = (i + 1 == n) ? b : 0.5 * (nodes[i] + nodes[i + 1]);
    }
    return c;
}

double kahan_total(const std::vector<double>& terms) {
    double sum = 0.0, comp = 0.0;
    for (double term : terms) {
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// Midpoint estimate of int_{cell_i x cell_j} K(x-y) dxdy at refinement
// level 0 (node pair) or 1 (each cell split in two per axis). Used for
// the graded correction on touching cell pairs, where the kernel varies
// too much for a single midpoint evaluation.
double pair_midpoint_1d(const KernelSpec& spec, double li, double ri, double lj, double rj,
                        int level) {
    const int parts = level == 0 ? 1 : 2;
    const double wi = (ri - li) / parts;
    const double wj = (rj - lj) / parts;
    double sum = 0.0;
    for (int a = 0; a < parts; ++a) {
        const double xa = li + (a + 0.5) * wi;
        for (int b = 0; b < parts; ++b) {
            const double yb = lj + (b + 0.5) * wj;
            sum += eval_kernel(spec, xa - yb) * wi * wj;
        }
    }
    return sum;
}

double pair_midpoint_2d(const KernelSpec& spec, const double* lo_i, const double* hi_i,
                        const double* lo_j, const double* hi_j, int level) {
    const int parts = level == 0 ? 1 : 2;
    const double wix = (hi_i[0] - lo_i[0]) / parts, wiy = (hi_i[1] - lo_i[1]) / parts;
    const double wjx = (hi_j[0] - lo_j[0]) / parts, wjy = (hi_j[1] - lo_j[1]) / parts;
    double sum = 0.0;
    for (int ax = 0; ax < parts; ++ax)
        for (int ay = 0; ay < parts; ++ay) {
            const double xx = lo_i[0] + (ax + 0.5) * wix;
            const double xy = lo_i[1] + (ay + 0.5) * wiy;
            for (int bx = 0; bx < parts; ++bx)
                for (int by = 0; by < parts; ++by) {
                    const double yx = lo_j[0] + (bx + 0.5) * wjx;
                    const double yy = lo_j[1] + (by + 0.5) * wjy;
                    sum += eval_kernel(spec, xx - yx, xy - yy) * wix * wiy * wjx * wjy;
                }
        }
    return sum;
}

double richardson(double coarse, double fine) { return fine + (fine - coarse) / 3.0; }

// 2*int_{COmega} K(x - y) dy for a 1D interval [a, b].
double exterior_raw_1d(const KernelSpec& spec, double x, double a, double b) {
    const double dl = x - a;
    const double dr = b - x;
    if (spec.family == KernelFamily::Fractional ||
        spec.family == KernelFamily::ScaledFractional) {
        const double pa = spec.p * spec.alpha;
        const double mu = spec.family == KernelFamily::ScaledFractional ? spec.multiplier : 1.0;
        return mu * (2.0 / pa) * (std::pow(dl, -pa) + std::pow(dr, -pa));
    }
    // Custom: adaptive quadrature to a cutoff plus a power-law tail.
    const double s = spec.grading_exponent();
    const double R = std::max(64.0, 64.0 * (b - a));
    auto half = [&](double d, double sign) {
        const double body = adaptive_simpson(
            [&](double t) { return eval_kernel(spec, sign * t); }, d, R, 1e-12);
        const double tail = eval_kernel(spec, sign * R) * R / (s - 1.0);
        return body + tail;
    };
    return 2.0 * (half(dl, 1.0) + half(dr, -1.0));
}

// Exit distance of the ray x + t*e_phi from the rectangle.
double ray_exit(double x, double y, double cphi, double sphi, const double* lo,
                const double* hi) {
    double t = std::numeric_limits<double>::infinity();
    if (cphi > 1e-300) t = std::min(t, (hi[0] - x) / cphi);
    if (cphi < -1e-300) t = std::min(t, (lo[0] - x) / cphi);
    if (sphi > 1e-300) t = std::min(t, (hi[1] - y) / sphi);
    if (sphi < -1e-300) t = std::min(t, (lo[1] - y) / sphi);
    return t;
}

// 2*int_{COmega} K(x - y) dy for a rectangle, in polar coordinates
// around x: the angular integral of int_{d(phi)}^inf K(t e_phi) t dt,
// split at the corner directions where d(phi) has kinks.
double exterior_raw_2d(const KernelSpec& spec, double x, double y, const double* lo,
                       const double* hi) {
    const bool power = spec.family == KernelFamily::Fractional ||
                       spec.family == KernelFamily::ScaledFractional;
    const double pa = spec.p * spec.alpha;
    const double mu = spec.family == KernelFamily::ScaledFractional ? spec.multiplier : 1.0;
    const double s = spec.grading_exponent();
    const double diam = std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
    const double Rcut = 64.0 * std::max(1.0, diam);

    auto radial = [&](double phi) {
        const double cphi = std::cos(phi), sphi = std::sin(phi);
        const double d = ray_exit(x, y, cphi, sphi, lo, hi);
        if (power) return mu * std::pow(d, -pa) / pa;
        const double body = adaptive_simpson(
            [&](double t) { return t * eval_kernel(spec, t * cphi, t * sphi); }, d, Rcut, 1e-10);
        const double tail =
            eval_kernel(spec, Rcut * cphi, Rcut * sphi) * Rcut * Rcut / (s - 2.0);
        return body + tail;
    };

    double corners[4] = {std::atan2(lo[1] - y, lo[0] - x), std::atan2(lo[1] - y, hi[0] - x),
                         std::atan2(hi[1] - y, lo[0] - x), std::atan2(hi[1] - y, hi[0] - x)};
    std::vector<double> cuts;
    for (double c : corners) cuts.push_back(c < 0.0 ? c + 2.0 * kPi : c);
    cuts.push_back(0.0);
    cuts.push_back(2.0 * kPi);
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        if (cuts[k + 1] - cuts[k] < 1e-14) continue;
        total += adaptive_simpson(radial, cuts[k], cuts[k + 1], power ? 1e-12 : 1e-8);
    }
    return 2.0 * total;
}

double signed_power(double sgn, double mag_pow) { return sgn < 0.0 ? -mag_pow : mag_pow; }

} // namespace

std::size_t EnergyWeights::tri_index(std::size_t i, std::size_t j) const {
    // strict upper triangle, row-major: requires i < j
    const std::size_t n = mesh->node_count();
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

double EnergyWeights::pair_weight(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return i < j ? pair[tri_index(i, j)] : pair[tri_index(j, i)];
}

EnergyWeights assemble_energy_weights(const Mesh& mesh, const KernelSpec& spec) {
    spec.validate();
    if (spec.n != mesh.dim)
        throw std::invalid_argument("assembly: kernel dimension does not match mesh");

    EnergyWeights w;
    w.mesh = &mesh;
    const std::size_t n = mesh.node_count();
    w.pair.assign(n * (n - 1) / 2, 0.0);
    w.exterior.assign(n, 0.0);

    const AxisCells cx = axis_cells(mesh.axis_nodes_x, mesh.lo[0], mesh.hi[0]);
    AxisCells cy;
    if (mesh.dim == 2) cy = axis_cells(mesh.axis_nodes_y, mesh.lo[1], mesh.hi[1]);

    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++idx) {
            double wij;
            if (mesh.dim == 1) {
                wij = eval_kernel(spec, mesh.node_x(i) - mesh.node_x(j)) *
                      mesh.cell_measure(i) * mesh.cell_measure(j);
                if (mesh.cells_adjacent(i, j)) {
                    const double c0 =
                        pair_midpoint_1d(spec, cx.left[i], cx.right[i], cx.left[j], cx.right[j], 0);
                    const double c1 =
                        pair_midpoint_1d(spec, cx.left[i], cx.right[i], cx.left[j], cx.right[j], 1);
                    wij = richardson(c0, c1);
                }
            } else {
                const std::size_t nx = mesh.axis_nodes_x.size();
                const std::size_t ixi = i % nx, iyi = i / nx;
                const std::size_t ixj = j % nx, iyj = j / nx;
                wij = eval_kernel(spec, mesh.node_x(i) - mesh.node_x(j),
                                  mesh.node_y(i) - mesh.node_y(j)) *
                      mesh.cell_measure(i) * mesh.cell_measure(j);
                if (mesh.cells_adjacent(i, j)) {
                    const double lo_i[2] = {cx.left[ixi], cy.left[iyi]};
                    const double hi_i[2] = {cx.right[ixi], cy.right[iyi]};
                    const double lo_j[2] = {cx.left[ixj], cy.left[iyj]};
                    const double hi_j[2] = {cx.right[ixj], cy.right[iyj]};
                    const double c0 = pair_midpoint_2d(spec, lo_i, hi_i, lo_j, hi_j, 0);
                    const double c1 = pair_midpoint_2d(spec, lo_i, hi_i, lo_j, hi_j, 1);
                    wij = richardson(c0, c1);
                }
            }
            w.pair[idx] = wij;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double raw =
            mesh.dim == 1
                ? exterior_raw_1d(spec, mesh.node_x(i), mesh.lo[0], mesh.hi[0])
                : exterior_raw_2d(spec, mesh.node_x(i), mesh.node_y(i), mesh.lo.data(),
                                  mesh.hi.data());
        w.exterior[i] = raw * mesh.cell_measure(i);
    }
    return w;
}

double seminorm_p(const Field& u, const EnergyWeights& w, double p) {
    if (!same_mesh(u.mesh, w.mesh))
        throw std::invalid_argument("seminorm_p: field and weights from different meshes");
    const std::size_t n = u.size();
    double sum = 0.0, comp = 0.0;
    auto add = [&](double term) {
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++idx) {
            const double d = u.values[i] - u.values[j];
            if (d != 0.0) add(2.0 * w.pair[idx] * std::pow(std::fabs(d), p));
        }
    for (std::size_t i = 0; i < n; ++i) {
        const double v = u.values[i];
        if (v != 0.0) add(w.exterior[i] * std::pow(std::fabs(v), p));
    }
    return sum;
}

double lp_norm(const Field& u, double m) {
    if (!(m >= 1.0))
        throw std::domain_error("lp_norm: m >= 1 violated (m=" + std::to_string(m) + ")");
    if (u.mesh == nullptr) throw std::invalid_argument("lp_norm: field without mesh");
    std::vector<double> terms;
    terms.reserve(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        terms.push_back(u.mesh->cell_measure(i) * std::pow(std::fabs(u.values[i]), m));
    return std::pow(kahan_total(terms), 1.0 / m);
}

Field apply_operator(const Field& u, const EnergyWeights& w, double p) {
    if (!same_mesh(u.mesh, w.mesh))
        throw std::invalid_argument("apply_operator: field and weights from different meshes");
    const std::size_t n = u.size();
    Field out(*u.mesh);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++idx) {
            const double d = u.values[i] - u.values[j];
            if (d == 0.0) continue;
            const double c = 2.0 * w.pair[idx] * signed_power(d, std::pow(std::fabs(d), p - 1.0));
            out.values[i] += c;
            out.values[j] -= c;
        }
    for (std::size_t i = 0; i < n; ++i) {
        const double v = u.values[i];
        if (v != 0.0)
            out.values[i] += w.exterior[i] * signed_power(v, std::pow(std::fabs(v), p - 1.0));
        out.values[i] /= u.mesh->cell_measure(i);
    }
    return out;
}

} // namespace nehari
