#ifndef NEHARI_ASSEMBLY_HPP
#define NEHARI_ASSEMBLY_HPP

#include <cstddef>
#include <vector>

#include "nehari/kernel.hpp"
#include "nehari/mesh.hpp"

namespace nehari {

/// Precomputed quadrature weights realising the discrete X0 energy
///
///   ||u||^p = 2 sum_{i<j} W_ij |u_i - u_j|^p + sum_i w_i |u_i|^p.
///
/// W_ij covers the Omega x Omega part of the double integral (stored
/// once for i<j, applied symmetrically); w_i covers the interaction
/// with the zero exterior, w_i ~ 2*cell_i*int_{COmega} K(x_i - y) dy.
/// Immutable once assembled; safe to share across threads.
struct EnergyWeights {
    const Mesh* mesh = nullptr;
    std::vector<double> pair;      // packed strict upper triangle
    std::vector<double> exterior;  // per node

    std::size_t tri_index(std::size_t i, std::size_t j) const;
    double pair_weight(std::size_t i, std::size_t j) const;
};

EnergyWeights assemble_energy_weights(const Mesh& mesh, const KernelSpec& spec);

/// The p-th power of the discrete X0 norm (see EnergyWeights). Zero iff
/// u vanishes identically.
double seminorm_p(const Field& u, const EnergyWeights& w, double p);

/// (sum_i cell_i |u_i|^m)^{1/m}; requires m >= 1.
double lp_norm(const Field& u, double m);

/// Discrete (-L_K u): node i receives
///   [2 sum_j W_ij |u_i-u_j|^{p-2}(u_i-u_j) + w_i |u_i|^{p-2} u_i] / cell_i,
/// so that pairing(apply_operator(u), u) == seminorm_p(u).
Field apply_operator(const Field& u, const EnergyWeights& w, double p);

} // namespace nehari

#endif
