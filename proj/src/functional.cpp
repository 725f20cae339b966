#include "nehari/functional.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nehari {

namespace {

// |v|^{s-1} v with the continuous extension by 0 at v = 0 (s may be < 1).
double odd_power(double v, double s) {
    if (v == 0.0) return 0.0;
    const double m = std::pow(std::fabs(v), s);
    return v < 0.0 ? -m : m;
}

} // namespace

double ProblemSpec::h_sup() const {
    double s = 0.0;
    for (double v : h_values) s = std::max(s, std::fabs(v));
    return s;
}

double ProblemSpec::b_plus_sup() const {
    double s = 0.0;
    for (double v : b_values) s = std::max(s, v);
    return s;
}

void ProblemSpec::validate() const {
    kernel.validate();
    if (kernel.n != mesh.dim)
        throw std::invalid_argument("problem: kernel dimension does not match mesh");
    const double pv = p();
    if (!(q > 0.0)) throw std::invalid_argument("problem: q > 0 violated (q=" + std::to_string(q) + ")");
    if (!(q < pv - 1.0))
        throw std::invalid_argument("problem: q < p-1 violated (q=" + std::to_string(q) +
                                    ", p=" + std::to_string(pv) + ")");
    if (!(r > pv - 1.0))
        throw std::invalid_argument("problem: p-1 < r violated (r=" + std::to_string(r) +
                                    ", p=" + std::to_string(pv) + ")");
    const double pstar = kernel.sobolev_critical();
    if (std::isfinite(pstar) && !(r < pstar - 1.0))
        throw std::invalid_argument("problem: r < p*-1 violated (r=" + std::to_string(r) +
                                    ", p*=" + std::to_string(pstar) + ")");
    if (!(lambda > 0.0))
        throw std::invalid_argument("problem: lambda > 0 violated (lambda=" +
                                    std::to_string(lambda) + ")");
    if (h_values.size() != mesh.node_count() || b_values.size() != mesh.node_count())
        throw std::invalid_argument("problem: h, b sample counts must equal node count");
    for (double v : h_values)
        if (!std::isfinite(v)) throw std::invalid_argument("problem: h not bounded at a node");
    for (double v : b_values)
        if (!std::isfinite(v)) throw std::invalid_argument("problem: b not bounded at a node");
}

ReducedIntegrals reduced_integrals(const ProblemSpec& spec, const EnergyWeights& w,
                                   const Field& u) {
    if (!same_mesh(u.mesh, w.mesh))
        throw std::invalid_argument("reduced_integrals: field and weights from different meshes");
    ReducedIntegrals ri;
    ri.A = seminorm_p(u, w, spec.p());
    double sb = 0.0, cb = 0.0, sd = 0.0, cd = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double cell = u.mesh->cell_measure(i);
        const double au = std::fabs(u.values[i]);
        if (au == 0.0) continue;
        const double tb = cell * spec.h_values[i] * std::pow(au, spec.q + 1.0);
        double y = tb - cb;
        double t = sb + y;
        cb = (t - sb) - y;
        sb = t;
        const double td = cell * spec.b_values[i] * std::pow(au, spec.r + 1.0);
        y = td - cd;
        t = sd + y;
        cd = (t - sd) - y;
        sd = t;
    }
    ri.B = sb;
    ri.D = sd;
    return ri;
}

double energy(const ProblemSpec& spec, const EnergyWeights& w, const Field& u) {
    const ReducedIntegrals ri = reduced_integrals(spec, w, u);
    return ri.A / spec.p() - spec.lambda * ri.B / (spec.q + 1.0) - ri.D / (spec.r + 1.0);
}

Field gradient(const ProblemSpec& spec, const EnergyWeights& w, const Field& u) {
    Field g = apply_operator(u, w, spec.p());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = u.values[i];
        g.values[i] -= spec.lambda * spec.h_values[i] * odd_power(v, spec.q);
        g.values[i] -= spec.b_values[i] * odd_power(v, spec.r);
    }
    return g;
}

SignClass classify(const ReducedIntegrals& ri, double tol_sign) {
    if (tol_sign < 0.0) throw std::invalid_argument("classify: tol_sign >= 0 violated");
    const double band = tol_sign * ri.A;
    SignClass c;
    c.h_sign = std::fabs(ri.B) <= band ? 0 : (ri.B > 0.0 ? 1 : -1);
    c.b_sign = std::fabs(ri.D) <= band ? 0 : (ri.D > 0.0 ? 1 : -1);
    return c;
}

std::string SignClass::name() const {
    auto part = [](int s, char letter) {
        if (s > 0) return std::string(1, letter) + "+";
        if (s < 0) return std::string(1, letter) + "-";
        return std::string(1, letter) + "0";
    };
    return part(h_sign, 'H') + " cap " + part(b_sign, 'B');
}

} // namespace nehari
