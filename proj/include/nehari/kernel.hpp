#ifndef NEHARI_KERNEL_HPP
#define NEHARI_KERNEL_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace nehari {

enum class KernelFamily { Fractional, ScaledFractional, Custom };

/// Interaction kernel K for the nonlocal operator. The admissible
/// families are the pure power kernel |z|^{-(n + p*alpha)}, a scaled
/// variant mu*|z|^{-(n + p*alpha)} with mu >= theta, and a caller-supplied
/// evaluator. Immutable after construction; evaluation is pure.
struct KernelSpec {
    int n = 1;             // spatial dimension, 1 or 2
    double p = 2.0;        // integrability exponent, p >= 2
    double alpha = 0.5;    // fractional order in (0,1)
    double theta = 1.0;    // lower-bound constant, theta > 0
    KernelFamily family = KernelFamily::Fractional;
    double multiplier = 1.0;  // ScaledFractional only, >= theta

    // Custom family: evaluator plus the local blow-up rate used for
    // quadrature grading and tail estimates (defaults to n + p*alpha).
    std::function<double(std::span<const double>)> evaluator;
    double singular_exponent = 0.0;

    static KernelSpec fractional(int n, double p, double alpha, double theta = 1.0);
    static KernelSpec scaled_fractional(int n, double p, double alpha, double theta,
                                        double multiplier);
    static KernelSpec custom(int n, double p, double alpha, double theta,
                             std::function<double(std::span<const double>)> evaluator,
                             double singular_exponent = 0.0);

    /// Throws std::invalid_argument naming the violated inequality.
    void validate() const;

    /// Grading exponent n + p*alpha (or the custom override).
    double grading_exponent() const;

    /// Critical Sobolev exponent p* = n p / (n - p alpha); +infinity when
    /// n <= p alpha (every finite target exponent is subcritical there).
    double sobolev_critical() const;
};

/// K(z) for z != 0. Throws std::domain_error at the singularity z = 0.
double eval_kernel(const KernelSpec& spec, std::span<const double> z);
double eval_kernel(const KernelSpec& spec, double z);           // n = 1
double eval_kernel(const KernelSpec& spec, double zx, double zy); // n = 2

/// Numerical certificate for the kernel conditions: integrability of
/// m(z)K(z) with m = min(1, |z|^p), the theta lower bound, and symmetry.
/// Certified at sample resolution only, never proven.
struct KernelCheckReport {
    double mk_integral = 0.0;   // ball quadrature + tail estimate
    double mk_tail = 0.0;       // the tail part, reported separately
    bool integrable_ok = false;
    bool lower_bound_ok = false;
    double worst_lower_ratio = 0.0;  // min over samples of K(z)|z|^{n+pa}/theta
    bool symmetry_ok = false;
    double max_asymmetry = 0.0;      // max over samples of |K(z)-K(-z)|

    bool admissible() const { return integrable_ok && lower_bound_ok && symmetry_ok; }
};

/// resolution controls the sampling density of the symmetry / lower-bound
/// grids and the quadrature refinement for the m*K integral.
KernelCheckReport check_admissible(const KernelSpec& spec, int resolution = 64,
                                   std::uint64_t seed = 42);

std::string to_string(KernelFamily family);

} // namespace nehari

#endif
