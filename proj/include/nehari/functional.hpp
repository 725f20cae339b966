#ifndef NEHARI_FUNCTIONAL_HPP
#define NEHARI_FUNCTIONAL_HPP

#include <string>
#include <vector>

#include "nehari/assembly.hpp"
#include "nehari/kernel.hpp"
#include "nehari/mesh.hpp"

namespace nehari {

/// Full problem data for
///   J(u) = ||u||^p / p - lambda/(q+1) int h |u|^{q+1} - 1/(r+1) int b |u|^{r+1}
/// with exponents 0 < q < p-1 < r < p*-1 and lambda > 0. h and b are
/// sampled at the mesh nodes.
struct ProblemSpec {
    KernelSpec kernel;
    Mesh mesh;
    double q = 0.5;
    double r = 3.0;
    double lambda = 0.1;
    std::vector<double> h_values;
    std::vector<double> b_values;

    double p() const { return kernel.p; }
    double h_sup() const;       // ||h||_inf from the samples
    double b_plus_sup() const;  // ||b+||_inf from the samples

    /// Validates the exponent ladder and data shapes; throws
    /// std::invalid_argument naming the violated inequality.
    void validate() const;
};

/// The triple (A, B, D) = (||u||^p, int h|u|^{q+1}, int b|u|^{r+1});
/// it determines the fibering map of u completely.
struct ReducedIntegrals {
    double A = 0.0;
    double B = 0.0;
    double D = 0.0;
};

/// Sign classification of (B, D) with a dead band: |B| <= tol*A maps to
/// h_sign = 0 (the measure-zero boundary class), likewise for D.
struct SignClass {
    int h_sign = 0;  // -1, 0, +1
    int b_sign = 0;

    bool boundary() const { return h_sign == 0 || b_sign == 0; }
    std::string name() const;
};

ReducedIntegrals reduced_integrals(const ProblemSpec& spec, const EnergyWeights& w,
                                   const Field& u);

/// J(u) = A/p - lambda*B/(q+1) - D/(r+1).
double energy(const ProblemSpec& spec, const EnergyWeights& w, const Field& u);

/// Riesz representative g of J'(u) in the cell-weighted pairing:
/// pairing(g, v) equals the directional derivative of J at u along v.
/// |u|^{q-1}u extends continuously by 0 at u = 0 (q may be < 1).
Field gradient(const ProblemSpec& spec, const EnergyWeights& w, const Field& u);

SignClass classify(const ReducedIntegrals& ri, double tol_sign = 1e-12);

} // namespace nehari

#endif
