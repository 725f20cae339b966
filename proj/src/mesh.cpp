#include "nehari/mesh.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace nehari {

namespace {

void build_axis(double a, double b, int n, std::vector<double>& nodes,
                std::vector<double>& meas) {
    const double h = (b - a) / (n + 1);
    nodes.resize(n);
    meas.resize(n);
    for (int i = 0; i < n; ++i) nodes[i] = a + (i + 1) * h;
    // Cell edges: a, midpoints between nodes, b. The boundary cells
    // absorb the half-cells next to the domain boundary.
    for (int i = 0; i < n; ++i) {
        const double left = (i == 0) ? a : 0.5 * (nodes[i - 1] + nodes[i]);
        const double right = (i == n - 1) ? b : 0.5 * (nodes[i] + nodes[i + 1]);
        meas[i] = right - left;
    }
}

} // namespace

std::size_t Mesh::node_count() const {
    const std::size_t n = static_cast<std::size_t>(nodes_per_axis);
    return dim == 1 ? n : n * n;
}

double Mesh::node_x(std::size_t i) const {
    if (dim == 1) return axis_nodes_x[i];
    return axis_nodes_x[i % axis_nodes_x.size()];
}

double Mesh::node_y(std::size_t i) const {
    return axis_nodes_y[i / axis_nodes_x.size()];
}

double Mesh::cell_measure(std::size_t i) const {
    if (dim == 1) return axis_meas_x[i];
    return axis_meas_x[i % axis_nodes_x.size()] * axis_meas_y[i / axis_nodes_x.size()];
}

double Mesh::spacing_x() const { return (hi[0] - lo[0]) / (nodes_per_axis + 1); }
double Mesh::spacing_y() const { return (hi[1] - lo[1]) / (nodes_per_axis + 1); }

double Mesh::volume() const {
    return dim == 1 ? (hi[0] - lo[0]) : (hi[0] - lo[0]) * (hi[1] - lo[1]);
}

double Mesh::node_distance(std::size_t i, std::size_t j) const {
    const double dx = node_x(i) - node_x(j);
    if (dim == 1) return std::fabs(dx);
    const double dy = node_y(i) - node_y(j);
    return std::sqrt(dx * dx + dy * dy);
}

bool Mesh::cells_adjacent(std::size_t i, std::size_t j) const {
    if (dim == 1) {
        return i != j && (i > j ? i - j : j - i) == 1;
    }
    const std::size_t n = axis_nodes_x.size();
    const long dix = static_cast<long>(i % n) - static_cast<long>(j % n);
    const long diy = static_cast<long>(i / n) - static_cast<long>(j / n);
    return i != j && std::labs(dix) <= 1 && std::labs(diy) <= 1;
}

bool Mesh::compatible(const Mesh& other) const {
    return dim == other.dim && nodes_per_axis == other.nodes_per_axis && lo == other.lo &&
           hi == other.hi;
}

bool same_mesh(const Mesh* a, const Mesh* b) {
    if (a == b) return a != nullptr;
    return a != nullptr && b != nullptr && a->compatible(*b);
}

Mesh build_mesh(double a, double b, int n_nodes) {
    if (n_nodes < 2)
        throw std::invalid_argument("mesh: N >= 2 violated (N=" + std::to_string(n_nodes) + ")");
    if (!(b > a)) throw std::invalid_argument("mesh: nondegenerate domain violated (a >= b)");
    Mesh m;
    m.dim = 1;
    m.lo = {a, 0.0};
    m.hi = {b, 0.0};
    m.nodes_per_axis = n_nodes;
    build_axis(a, b, n_nodes, m.axis_nodes_x, m.axis_meas_x);
    return m;
}

Mesh build_mesh(double ax, double bx, double ay, double by, int n_nodes) {
    if (n_nodes < 2)
        throw std::invalid_argument("mesh: N >= 2 violated (N=" + std::to_string(n_nodes) + ")");
    if (!(bx > ax) || !(by > ay))
        throw std::invalid_argument("mesh: nondegenerate domain violated");
    Mesh m;
    m.dim = 2;
    m.lo = {ax, ay};
    m.hi = {bx, by};
    m.nodes_per_axis = n_nodes;
    build_axis(ax, bx, n_nodes, m.axis_nodes_x, m.axis_meas_x);
    build_axis(ay, by, n_nodes, m.axis_nodes_y, m.axis_meas_y);
    return m;
}

Field::Field(const Mesh& m, std::vector<double> v) : mesh(&m), values(std::move(v)) {
    if (values.size() != m.node_count())
        throw std::invalid_argument("field: length must equal node count");
}

double pairing(const Field& a, const Field& b) {
    if (!same_mesh(a.mesh, b.mesh))
        throw std::invalid_argument("pairing: fields from different meshes");
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double term = a.mesh->cell_measure(i) * a.values[i] * b.values[i];
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace nehari
