#include "nehari/quadrature.hpp"

#include <cmath>

namespace nehari {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// force > 0 refines unconditionally: the plain error estimate can spuriously
// vanish on the first levels when the integrand has a periodic symmetry
// aligned with the interval (the samples coincide in value).
double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth,
                     int force) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (force <= 0 && (depth <= 0 || std::fabs(delta) <= 15.0 * tol)) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0) return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, force - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, force - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth, 3);
}

double integrate_from_zero(const std::function<double(double)>& f, double b, double tol) {
    if (b <= 0.0) return 0.0;
    // t = b*exp(s), s in (-inf, 0]; truncation at s = -60 covers factors
    // down to ~1e-26, far below tol for integrable singularities.
    const auto g = [&](double s) {
        const double t = b * std::exp(s);
        return f(t) * t;
    };
    return adaptive_simpson(g, -60.0, 0.0, tol);
}

} // namespace nehari
