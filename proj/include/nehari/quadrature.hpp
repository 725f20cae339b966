#ifndef NEHARI_QUADRATURE_HPP
#define NEHARI_QUADRATURE_HPP

#include <functional>

namespace nehari {

/// Adaptive Simpson integration of f over [a, b].
/// tol is an absolute tolerance for the whole interval; the recursion
/// distributes it over subintervals and stops at max_depth.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40);

/// Integral of f over (0, b] where f may have an integrable power
/// singularity at 0. Uses the substitution t = exp(s), which turns
/// t^c with c > -1 into an exponentially decaying smooth integrand.
double integrate_from_zero(const std::function<double(double)>& f, double b,
                           double tol = 1e-12);

} // namespace nehari

#endif
