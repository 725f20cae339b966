#ifndef NEHARI_FIBERING_HPP
#define NEHARI_FIBERING_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nehari/functional.hpp"

namespace nehari {

/// The scalar data (p, q, r, lambda) driving a fibering map. Fibering
/// analysis only ever sees a field through its ReducedIntegrals, so the
/// whole module works on (A, B, D) plus these exponents.
struct Exponents {
    double p = 2.0;
    double q = 0.5;
    double r = 3.0;
    double lambda = 0.1;

    static Exponents of(const ProblemSpec& spec) {
        return {spec.p(), spec.q, spec.r, spec.lambda};
    }
};

/// phi(t)   = t^p A/p - lambda t^{q+1} B/(q+1) - t^{r+1} D/(r+1)
/// phi'(t)  = t^{p-1} A - lambda t^q B - t^r D
/// phi''(t) = (p-1) t^{p-2} A - q lambda t^{q-1} B - r t^{r-1} D
/// All require t >= 0 (derivatives t > 0); t < 0 throws std::domain_error.
double phi(const ReducedIntegrals& ri, const Exponents& ex, double t);
double phi_prime(const ReducedIntegrals& ri, const Exponents& ex, double t);
double phi_second(const ReducedIntegrals& ri, const Exponents& ex, double t);

/// Scale max(1, |t^{p-1}A|, |lambda t^q B|, |t^r D|) used for relative
/// root residuals.
double phi_prime_scale(const ReducedIntegrals& ri, const Exponents& ex, double t);

/// m_u(t) = t^{p-1-q} A - t^{r-q} D, so phi'(t) = t^q (m_u(t) - lambda B).
double m_u(const ReducedIntegrals& ri, const Exponents& ex, double t);

/// Maximizer of m_u when D > 0: t_hat = ((p-1-q)A / ((r-q)D))^{1/(r-p+1)}.
double m_u_argmax(const ReducedIntegrals& ri, const Exponents& ex);

enum class RootKind { Min, Max, Inflection };

struct FiberingRoot {
    double t = 0.0;
    RootKind kind = RootKind::Min;
    double phi_value = 0.0;
    double phi_second_value = 0.0;
};

/// Complete fibering diagnosis of one ray t -> J(tu). The root list is
/// ascending in t; kinds follow the sign of phi''. In the H+ (cap) B+
/// class with lambda at/above the two-root threshold, `degenerate` is
/// set and the report carries whatever roots remain.
struct FiberingReport {
    SignClass sign_class;
    std::vector<FiberingRoot> roots;
    std::optional<double> t_star;       // only when D > 0
    std::optional<double> F_at_t_star;  // max of the lambda-free part
    bool degenerate = false;
    std::string note;
};

/// Case table: (B<0, D<0) no roots; (B<0, D>0) one Max; (B>0, D<0) one
/// Min; (B>0, D>0) Min then Max below the threshold. Roots are found by
/// bisection on brackets derived from the structure of m_u. Throws
/// std::invalid_argument for A = 0 (zero field).
FiberingReport critical_points(const ReducedIntegrals& ri, const Exponents& ex);

/// t* = (A/D)^{1/(r-p+1)} and F(t*) = (1/p - 1/(r+1)) (A^{r+1}/D^p)^{1/(r-p+1)}.
struct TStar {
    double t = 0.0;
    double F_value = 0.0;
};

/// Requires D > 0; otherwise throws ProjectionError (branch not applicable).
TStar t_star_and_delta(const ReducedIntegrals& ri, const Exponents& ex);

enum class Branch { Plus, Minus };
std::string to_string(Branch b);

/// Raised when a requested fibering branch does not exist for the given
/// sign class; the message names the case.
class ProjectionError : public std::runtime_error {
public:
    explicit ProjectionError(const std::string& what) : std::runtime_error(what) {}
};

/// Scaling t > 0 with t*u on the requested Nehari branch: the Min root
/// for Plus, the Max root for Minus.
double project(const ReducedIntegrals& ri, const Exponents& ex, Branch branch);

struct SamplerConfig {
    int starts = 64;
    int ascent_steps = 200;
    std::uint64_t seed = 42;
};

/// Desk-scale estimate of the threshold lambda_0 below which every
/// fibering map in H+ (cap) B+ has exactly two critical points. The
/// embedding constants are sampled suprema (multistart + local ascent),
/// so the result is an estimate, not a proof-grade constant; all raw
/// constants are reported for audit.
struct Lambda0Estimate {
    double S_p = 0.0;    // embedding constant for exponent p (enters M)
    double S_q1 = 0.0;   // exponent q+1
    double S_r1 = 0.0;   // exponent r+1
    double M = 0.0;      // discrete X0 -> W^{alpha,p} comparison constant
    double delta = 0.0;  // uniform lower bound for F(t*)
    double c_const = 0.0;
    double lambda0 = 0.0;

    double p = 0.0, q = 0.0, r = 0.0;  // snapshot for delta1
    double h_sup = 0.0, b_plus_sup = 0.0;

    bool ok = false;
    std::string failure_reason;

    /// delta_1 = delta^{(q+1)/p} (delta^{(p-1-q)/p} - lambda*c), the
    /// uniform energy lower bound on the Max branch for lambda < lambda0.
    double delta1(double lambda) const;
};

Lambda0Estimate estimate_lambda0(const ProblemSpec& spec, const EnergyWeights& w,
                                 const SamplerConfig& sampler = {});

std::string to_string(RootKind kind);

} // namespace nehari

#endif
