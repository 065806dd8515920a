#pragma once

#include <memory>
#include <vector>

#include "locspec/banded.hpp"
#include "locspec/potential.hpp"

namespace locspec {

/// Nodes of a 1-D mesh on [a, b], strictly increasing, both ends included.
class Mesh {
public:
    explicit Mesh(std::vector<double> nodes);

    Interval interval() const { return {nodes_.front(), nodes_.back()}; }
    const std::vector<double>& nodes() const { return nodes_; }
    int elements() const { return static_cast<int>(nodes_.size()) - 1; }
    int interior_nodes() const { return static_cast<int>(nodes_.size()) - 2; }
    double max_element() const;
    double min_element() const;

private:
    std::vector<double> nodes_;
};

/// Uniform nodes with spacing <= target_h plus every breakpoint of Q inside the interval.
/// Uniform nodes closer than 1e-9 * h to a breakpoint are replaced by it.
Mesh build_mesh(const HermitianPotential& potential, Interval iv, double target_h);

/// Splits every element in half (coarse nodes are kept).
Mesh refine(const Mesh& mesh);

/// Discretized form t[y] = int (y', y') - (Q y, y') - (Q y', y) on continuous piecewise-linear
/// functions vanishing at both ends, and the matching mass matrix.
///
/// Unknown (node i, component c) has index i * m + c, so both matrices are block-tridiagonal
/// with scalar bandwidth 2m - 1.
struct FormPencil {
    BandedHermitian stiffness;  // A = K - B - B^dagger
    BandedHermitian mass;       // M
    std::shared_ptr<const Mesh> mesh;
    int dimension = 1;

    int size() const { return stiffness.size(); }
};

/// Throws ContractViolation when a breakpoint of Q inside the mesh interval is not a node, and
/// DomainError when the interval leaves the support of Q.
FormPencil assemble(const HermitianPotential& potential, const Mesh& mesh);

/// (c^dagger A c) / (c^dagger M c). Throws DomainError for the zero vector.
double rayleigh(const FormPencil& pencil, const Vector& c);

/// Nodal interpolant (interior nodes only) of a vector function.
template <typename F>
Vector interpolate(const FormPencil& pencil, F&& f) {
    const auto& x = pencil.mesh->nodes();
    const int m = pencil.dimension;
    Vector c(pencil.size());
    for (int i = 1; i + 1 < static_cast<int>(x.size()); ++i) c.segment((i - 1) * m, m) = f(x[static_cast<std::size_t>(i)]);
    return c;
}

/// Eliminates the O(h^2) term from eigenvalues on a mesh and its uniform refinement.
inline double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

}  // namespace locspec
