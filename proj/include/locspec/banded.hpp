#pragma once

#include <span>
#include <vector>

#include "locspec/types.hpp"

namespace locspec {

/// Hermitian matrix stored by its lower band: entry (i, j) with 0 <= i - j <= bandwidth.
class BandedHermitian {
public:
    BandedHermitian() = default;
    BandedHermitian(int size, int bandwidth);

    int size() const { return n_; }
    int bandwidth() const { return kd_; }

    /// Lower-triangle access, requires 0 <= i - j <= bandwidth.
    Complex& lower(int i, int j) { return data_[index(i, j)]; }
    const Complex& lower(int i, int j) const { return data_[index(i, j)]; }

    /// Full Hermitian access; zero outside the band.
    Complex operator()(int i, int j) const;

    /// Adds v at (i, j) and keeps the Hermitian partner consistent; ignores i < j by
    /// conjugating into the lower triangle.
    void add(int i, int j, Complex v);

    /// y = A x
    Vector multiply(const Vector& x) const;

    /// this - sigma * other (same shape).
    BandedHermitian shifted_by(const BandedHermitian& other, double sigma) const;

    /// Largest |entry|.
    double max_abs() const;

    /// Forces a real diagonal.
    void make_diagonal_real();

    Eigen::MatrixXcd to_dense() const;

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(kd_ + 1) + static_cast<std::size_t>(i - j);
    }

    int n_ = 0;
    int kd_ = 0;
    std::vector<Complex> data_;
};

/// A = L D L^dagger without pivoting; L unit lower banded, D real.
class BandedLdl {
public:
    /// Throws SingularShift (with `shift` as the reported value) when a pivot is exactly zero.
    BandedLdl(const BandedHermitian& a, double shift_for_errors = 0.0);

    /// Number of negative pivots = number of negative eigenvalues (Sylvester).
    int negative_pivots() const;
    double min_abs_pivot() const;

    Vector solve(const Vector& b) const;

private:
    BandedHermitian l_;  // strictly lower part holds L, diagonal unused
    std::vector<double> d_;
};

}  // namespace locspec
