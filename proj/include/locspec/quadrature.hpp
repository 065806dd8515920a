#pragma once

#include <vector>

namespace locspec {

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n - 1.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    int size() const { return static_cast<int>(nodes.size()); }
};

/// n-point rule, computed once per n and cached (thread-safe).
const GaussRule& gauss_legendre(int n);

/// Number of points that integrates Q(x) * (hat function) exactly for deg Q = degree.
int assembly_rule_size(int degree);

}  // namespace locspec
