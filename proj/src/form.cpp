#include "locspec/form.hpp"

#include <algorithm>
#include <cmath>

#include "locspec/errors.hpp"
#include "locspec/quadrature.hpp"

namespace locspec {

Mesh::Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw DomainError("mesh needs at least two nodes");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        if (!(nodes_[i] < nodes_[i + 1]) || !std::isfinite(nodes_[i]) || !std::isfinite(nodes_[i + 1])) {
            throw DomainError("mesh nodes must be finite and strictly increasing");
        }
    }
}

double Mesh::max_element() const {
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) h = std::max(h, nodes_[i + 1] - nodes_[i]);
    return h;
}

double Mesh::min_element() const {
    double h = nodes_.back() - nodes_.front();
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) h = std::min(h, nodes_[i + 1] - nodes_[i]);
    return h;
}

Mesh build_mesh(const HermitianPotential& potential, Interval iv, double target_h) {
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
        throw DomainError("mesh interval must be finite and nonempty");
    }
    if (!(target_h > 0.0) || !std::isfinite(target_h)) throw DomainError("target_h must be positive");
    const double length = iv.hi - iv.lo;
    const int n = std::max(1, static_cast<int>(std::ceil(length / target_h * (1.0 - 1e-12))));
    std::vector<double> nodes(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) nodes[static_cast<std::size_t>(i)] = iv.lo + length * i / n;
    nodes.back() = iv.hi;

    const double h = length / n;
    const std::vector<double> breaks = potential.breakpoints_in(iv);
    for (double b : breaks) {
        const auto i = static_cast<std::size_t>(std::lround((b - iv.lo) / h));
        if (i > 0 && i < nodes.size() - 1 && std::abs(nodes[i] - b) <= 1e-9 * h) nodes[i] = b;
    }
    nodes.insert(nodes.end(), breaks.begin(), breaks.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return Mesh(std::move(nodes));
}

Mesh refine(const Mesh& mesh) {
    const auto& x = mesh.nodes();
    std::vector<double> nodes;
    nodes.reserve(2 * x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        nodes.push_back(x[i]);
        nodes.push_back(0.5 * (x[i] + x[i + 1]));
    }
    nodes.push_back(x.back());
    return Mesh(std::move(nodes));
}

namespace {

// Adds an m x m block at block position (bi, bj) with bi >= bj, keeping only the lower triangle.
void add_block(BandedHermitian& a, int bi, int bj, const Matrix& block) {
    const int m = static_cast<int>(block.rows());
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            const int i = bi * m + r;
            const int j = bj * m + c;
            if (i >= j) a.add(i, j, block(r, c));
        }
    }
}

}  // namespace

FormPencil assemble(const HermitianPotential& potential, const Mesh& mesh) {
    const Interval iv = mesh.interval();
    if (!potential.covers(iv)) throw DomainError("mesh interval leaves the support of Q");
    const auto& x = mesh.nodes();
    for (double b : potential.breakpoints_in(iv)) {
        if (!std::binary_search(x.begin(), x.end(), b)) {
            throw ContractViolation("breakpoint " + std::to_string(b) + " of Q is not a mesh node");
        }
    }

    const int m = potential.dimension();
    const int interior = mesh.interior_nodes();
    const Matrix id = Matrix::Identity(m, m);
    FormPencil pencil{BandedHermitian(interior * m, 2 * m - 1), BandedHermitian(interior * m, 2 * m - 1),
                      std::make_shared<const Mesh>(mesh), m};

    for (int e = 0; e < mesh.elements(); ++e) {
        const double xl = x[static_cast<std::size_t>(e)];
        const double xr = x[static_cast<std::size_t>(e) + 1];
        const double h = xr - xl;
        const PolyMatrix q = potential.segment({xl, xr});
        const GaussRule& rule = gauss_legendre(assembly_rule_size(q.degree()));

        // Moments int Q phi_L and int Q phi_R over the element.
        Matrix il = Matrix::Zero(m, m);
        Matrix ir = Matrix::Zero(m, m);
        const double mid = 0.5 * (xl + xr);
        const double rad = 0.5 * h;
        for (int k = 0; k < rule.size(); ++k) {
            const double t = rule.nodes[static_cast<std::size_t>(k)];
            const double w = rad * rule.weights[static_cast<std::size_t>(k)];
            const Matrix qv = q(mid + rad * t);
            il += (w * 0.5 * (1.0 - t)) * qv;
            ir += (w * 0.5 * (1.0 + t)) * qv;
        }

        // Local blocks of K - B - B^dagger with B_ab = phi_a' int Q phi_b.
        const Matrix a_ll = id / h + (il + il.adjoint()) / h;
        const Matrix a_rr = id / h - (ir + ir.adjoint()) / h;
        const Matrix a_rl = (-id / h + ir / h - il.adjoint() / h).adjoint();
        const Matrix m_diag = (h / 3.0) * id;
        const Matrix m_off = (h / 6.0) * id;

        // Interior node i carries block index i - 1.
        const int left = e - 1;
        const int right = e;
        const bool has_left = e >= 1;
        const bool has_right = e + 1 <= interior;
        if (has_left) {
            add_block(pencil.stiffness, left, left, a_ll);
            add_block(pencil.mass, left, left, m_diag);
        }
        if (has_right) {
            add_block(pencil.stiffness, right, right, a_rr);
            add_block(pencil.mass, right, right, m_diag);
        }
        if (has_left && has_right) {
            add_block(pencil.stiffness, right, left, a_rl);
            add_block(pencil.mass, right, left, m_off);
        }
    }
    pencil.stiffness.make_diagonal_real();
    pencil.mass.make_diagonal_real();
    return pencil;
}

double rayleigh(const FormPencil& pencil, const Vector& c) {
    if (c.size() != pencil.size()) throw DomainError("coefficient vector has wrong length");
    const double denom = c.dot(pencil.mass.multiply(c)).real();
    if (!(denom > 0.0)) throw DomainError("Rayleigh quotient of the zero vector");
    return c.dot(pencil.stiffness.multiply(c)).real() / denom;
}

}  // namespace locspec
