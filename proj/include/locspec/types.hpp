#pragma once

#include <complex>

#include <Eigen/Core>

namespace locspec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Open interval (lo, hi) of the real line; either end may be infinite.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

}  // namespace locspec
