#include "nehari/kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nehari/quadrature.hpp"
#include "nehari/rng.hpp"

namespace nehari {

namespace {

double norm_of(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return std::sqrt(s);
}

} // namespace

KernelSpec KernelSpec::fractional(int n, double p, double alpha, double theta) {
    KernelSpec k;
    k.n = n;
    k.p = p;
    k.alpha = alpha;
    k.theta = theta;
    k.family = KernelFamily::Fractional;
    k.validate();
    return k;
}

KernelSpec KernelSpec::scaled_fractional(int n, double p, double alpha, double theta,
                                         double multiplier) {
    KernelSpec k;
    k.n = n;
    k.p = p;
    k.alpha = alpha;
    k.theta = theta;
    k.family = KernelFamily::ScaledFractional;
    k.multiplier = multiplier;
    k.validate();
    return k;
}

KernelSpec KernelSpec::custom(int n, double p, double alpha, double theta,
                              std::function<double(std::span<const double>)> evaluator,
                              double singular_exponent) {
    KernelSpec k;
    k.n = n;
    k.p = p;
    k.alpha = alpha;
    k.theta = theta;
    k.family = KernelFamily::Custom;
    k.evaluator = std::move(evaluator);
    k.singular_exponent = singular_exponent;
    k.validate();
    return k;
}

void KernelSpec::validate() const {
    if (n != 1 && n != 2)
        throw std::invalid_argument("kernel: n in {1,2} violated (n=" + std::to_string(n) + ")");
    if (!(p >= 2.0))
        throw std::invalid_argument("kernel: p >= 2 violated (p=" + std::to_string(p) + ")");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("kernel: 0 < alpha < 1 violated (alpha=" +
                                    std::to_string(alpha) + ")");
    if (!(theta > 0.0))
        throw std::invalid_argument("kernel: theta > 0 violated (theta=" +
                                    std::to_string(theta) + ")");
    if (family == KernelFamily::ScaledFractional && !(multiplier >= theta))
        throw std::invalid_argument("kernel: multiplier >= theta violated (multiplier=" +
                                    std::to_string(multiplier) + ")");
    if (family == KernelFamily::Custom && !evaluator)
        throw std::invalid_argument("kernel: custom family requires an evaluator");
}

double KernelSpec::grading_exponent() const {
    if (family == KernelFamily::Custom && singular_exponent > 0.0) return singular_exponent;
    return static_cast<double>(n) + p * alpha;
}

double KernelSpec::sobolev_critical() const {
    const double denom = static_cast<double>(n) - p * alpha;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(n) * p / denom;
}

double eval_kernel(const KernelSpec& spec, std::span<const double> z) {
    const double rz = norm_of(z);
    if (!(rz > 0.0)) throw std::domain_error("kernel singularity: K evaluated at z = 0");
    switch (spec.family) {
        case KernelFamily::Fractional:
            return std::pow(rz, -(static_cast<double>(spec.n) + spec.p * spec.alpha));
        case KernelFamily::ScaledFractional:
            return spec.multiplier *
                   std::pow(rz, -(static_cast<double>(spec.n) + spec.p * spec.alpha));
        case KernelFamily::Custom:
            return spec.evaluator(z);
    }
    throw std::logic_error("unreachable kernel family");
}

double eval_kernel(const KernelSpec& spec, double z) {
    return eval_kernel(spec, std::span<const double>(&z, 1));
}

double eval_kernel(const KernelSpec& spec, double zx, double zy) {
    const double z[2] = {zx, zy};
    return eval_kernel(spec, std::span<const double>(z, 2));
}

namespace {

// int_{|z|>R} K via the grading exponent s: exact for power kernels,
// an asymptotic estimate otherwise.
double tail_integral(const KernelSpec& spec, double R, bool& ok) {
    const double s = spec.grading_exponent();
    if (!(s > static_cast<double>(spec.n))) {
        ok = false;
        return std::numeric_limits<double>::infinity();
    }
    if (spec.n == 1) {
        const double k = eval_kernel(spec, R) + eval_kernel(spec, -R);
        return k * R / (s - 1.0);
    }
    const int m_ang = 64;
    double avg = 0.0;
    for (int a = 0; a < m_ang; ++a) {
        const double phi = 2.0 * 3.141592653589793 * (a + 0.5) / m_ang;
        avg += eval_kernel(spec, R * std::cos(phi), R * std::sin(phi));
    }
    avg /= m_ang;
    return 2.0 * 3.141592653589793 * avg * R * R / (s - 2.0);
}

} // namespace

KernelCheckReport check_admissible(const KernelSpec& spec, int resolution,
                                   std::uint64_t seed) {
    if (resolution <= 0) throw std::invalid_argument("check_admissible: resolution > 0 violated");
    spec.validate();

    KernelCheckReport rep;
    const double tol = 1e-4 / (static_cast<double>(resolution) * resolution);
    const double R0 = 32.0;
    const double pi = 3.141592653589793;

    // m(z)K(z) over the unit ball (m = |z|^p there) plus the annulus up
    // to R0 (m = 1), then the asymptotic tail.
    double ball = 0.0, middle = 0.0;
    bool finite_ok = true;
    if (spec.n == 1) {
        ball = integrate_from_zero(
            [&](double t) {
                return std::pow(t, spec.p) * (eval_kernel(spec, t) + eval_kernel(spec, -t));
            },
            1.0, tol);
        middle = adaptive_simpson(
            [&](double t) { return eval_kernel(spec, t) + eval_kernel(spec, -t); }, 1.0, R0,
            tol);
    } else {
        const int m_ang = 16 * resolution;
        double ball_acc = 0.0, mid_acc = 0.0;
        for (int a = 0; a < m_ang; ++a) {
            const double phi = 2.0 * pi * (a + 0.5) / m_ang;
            const double cx = std::cos(phi), sy = std::sin(phi);
            ball_acc += integrate_from_zero(
                [&](double t) {
                    return std::pow(t, spec.p + 1.0) * eval_kernel(spec, t * cx, t * sy);
                },
                1.0, tol);
            mid_acc += adaptive_simpson(
                [&](double t) { return t * eval_kernel(spec, t * cx, t * sy); }, 1.0, R0, tol);
        }
        ball = ball_acc * 2.0 * pi / m_ang;
        middle = mid_acc * 2.0 * pi / m_ang;
    }
    rep.mk_tail = tail_integral(spec, R0, finite_ok);
    rep.mk_integral = ball + middle + rep.mk_tail;
    rep.integrable_ok = finite_ok && std::isfinite(rep.mk_integral) && rep.mk_integral > 0.0;

    // Symmetry and the theta lower bound on structured + random samples.
    Rng rng(seed);
    const double s_exp = static_cast<double>(spec.n) + spec.p * spec.alpha;
    double worst_ratio = std::numeric_limits<double>::infinity();
    double max_asym = 0.0;
    bool sym_ok = true;

    auto probe = [&](std::span<const double> z) {
        const double kz = eval_kernel(spec, z);
        double zneg[2] = {-z[0], z.size() > 1 ? -z[1] : 0.0};
        const double kn = eval_kernel(spec, std::span<const double>(zneg, z.size()));
        const double asym = std::fabs(kz - kn);
        max_asym = std::max(max_asym, asym);
        if (asym > 1e-10 * (kz + kn)) sym_ok = false;
        const double ratio = kz * std::pow(norm_of(z), s_exp) / spec.theta;
        worst_ratio = std::min(worst_ratio, ratio);
    };

    for (int i = 0; i < resolution; ++i) {
        const double radius = 0.05 + (3.0 - 0.05) * i / std::max(1, resolution - 1);
        if (spec.n == 1) {
            const double z = radius;
            probe(std::span<const double>(&z, 1));
        } else {
            for (int a = 0; a < 8; ++a) {
                const double phi = 2.0 * pi * (a + 0.5) / 8.0;
                const double z[2] = {radius * std::cos(phi), radius * std::sin(phi)};
                probe(std::span<const double>(z, 2));
            }
        }
    }
    for (int i = 0; i < resolution; ++i) {
        const double radius = std::exp(rng.uniform(std::log(1e-3), std::log(8.0)));
        if (spec.n == 1) {
            const double z = rng.uniform() < 0.5 ? radius : -radius;
            probe(std::span<const double>(&z, 1));
        } else {
            const double phi = rng.uniform(0.0, 2.0 * pi);
            const double z[2] = {radius * std::cos(phi), radius * std::sin(phi)};
            probe(std::span<const double>(z, 2));
        }
    }

    rep.symmetry_ok = sym_ok;
    rep.max_asymmetry = max_asym;
    rep.worst_lower_ratio = worst_ratio;
    rep.lower_bound_ok = worst_ratio >= 1.0 - 1e-10;
    return rep;
}

std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::Fractional: return "fractional";
        case KernelFamily::ScaledFractional: return "scaled_fractional";
        case KernelFamily::Custom: return "custom";
    }
    return "?";
}

} // namespace nehari
