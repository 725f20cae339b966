#ifndef NEHARI_MESH_HPP
#define NEHARI_MESH_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace nehari {

/// Uniform interior-node mesh of an interval (n=1) or axis-aligned
/// rectangle (n=2). Along each axis the N nodes sit at a + i*h with
/// h = (b-a)/(N+1); the surrounding cells are the midpoint cells with
/// the two boundary half-cells absorbed into the first and last cell,
/// so the cell measures tile the domain exactly. Fields are understood
/// to vanish identically outside the domain (zero exterior extension).
struct Mesh {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 0.0};
    int nodes_per_axis = 0;

    std::vector<double> axis_nodes_x, axis_nodes_y;
    std::vector<double> axis_meas_x, axis_meas_y;

    std::size_t node_count() const;
    double node_x(std::size_t i) const;
    double node_y(std::size_t i) const;  // 2D only
    double cell_measure(std::size_t i) const;
    double spacing_x() const;
    double spacing_y() const;
    double volume() const;
    /// Distance between nodes i and j.
    double node_distance(std::size_t i, std::size_t j) const;
    /// True when the cells of i and j touch (share a face or corner).
    bool cells_adjacent(std::size_t i, std::size_t j) const;
    /// Same discretization (dimension, domain, node count).
    bool compatible(const Mesh& other) const;
};

/// Structural mesh compatibility for fields/weights built separately.
bool same_mesh(const Mesh* a, const Mesh* b);

/// 1D mesh on [a, b]. Throws std::invalid_argument for N < 2 or a
/// degenerate interval.
Mesh build_mesh(double a, double b, int n_nodes);

/// 2D mesh on [ax, bx] x [ay, by] with n_nodes per axis.
Mesh build_mesh(double ax, double bx, double ay, double by, int n_nodes);

/// Nodal coefficient vector of a field u on a mesh; u = 0 outside the
/// domain by construction (no exterior values are stored).
struct Field {
    const Mesh* mesh = nullptr;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Mesh& m) : mesh(&m), values(m.node_count(), 0.0) {}
    Field(const Mesh& m, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Sum_i cell_i * a_i * b_i, the discrete L^2 pairing on the mesh.
double pairing(const Field& a, const Field& b);

} // namespace nehari

#endif
