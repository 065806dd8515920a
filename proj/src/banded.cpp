#include "locspec/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "locspec/errors.hpp"

namespace locspec {

BandedHermitian::BandedHermitian(int size, int bandwidth)
    : n_(size), kd_(bandwidth), data_(static_cast<std::size_t>(size) * static_cast<std::size_t>(bandwidth + 1)) {
    if (size < 0 || bandwidth < 0) throw ContractViolation("banded matrix needs nonnegative size and bandwidth");
}

Complex BandedHermitian::operator()(int i, int j) const {
    if (i >= j) return (i - j <= kd_) ? data_[index(i, j)] : Complex{};
    return (j - i <= kd_) ? std::conj(data_[index(j, i)]) : Complex{};
}

void BandedHermitian::add(int i, int j, Complex v) {
    if (i < j) {
        std::swap(i, j);
        v = std::conj(v);
    }
    if (i - j > kd_) throw ContractViolation("entry outside the band");
    data_[index(i, j)] += v;
}

Vector BandedHermitian::multiply(const Vector& x) const {
    Vector y = Vector::Zero(n_);
    for (int j = 0; j < n_; ++j) {
        y[j] += data_[index(j, j)] * x[j];
        const int last = std::min(n_ - 1, j + kd_);
        for (int i = j + 1; i <= last; ++i) {
            const Complex a = data_[index(i, j)];
            y[i] += a * x[j];
            y[j] += std::conj(a) * x[i];
        }
    }
    return y;
}

BandedHermitian BandedHermitian::shifted_by(const BandedHermitian& other, double sigma) const {
    if (other.n_ != n_ || other.kd_ != kd_) throw ContractViolation("banded shapes differ");
    BandedHermitian out(*this);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] -= sigma * other.data_[k];
    return out;
}

double BandedHermitian::max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
}

void BandedHermitian::make_diagonal_real() {
    for (int j = 0; j < n_; ++j) data_[index(j, j)] = data_[index(j, j)].real();
}

Eigen::MatrixXcd BandedHermitian::to_dense() const {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_, n_);
    for (int j = 0; j < n_; ++j) {
        for (int i = j; i <= std::min(n_ - 1, j + kd_); ++i) {
            a(i, j) = data_[index(i, j)];
            if (i != j) a(j, i) = std::conj(data_[index(i, j)]);
        }
    }
    return a;
}

BandedLdl::BandedLdl(const BandedHermitian& a, double shift_for_errors)
    : l_(a.size(), a.bandwidth()), d_(static_cast<std::size_t>(a.size())) {
    const int n = a.size();
    const int kd = a.bandwidth();
    // Column-oriented: for each column j, D_j then L(i, j) for i in (j, j + kd].
    std::vector<Complex> work(static_cast<std::size_t>(kd + 1));
    for (int j = 0; j < n; ++j) {
        const int k0 = std::max(0, j - kd);
        // work[k - k0] = L(j, k) D_k for k < j
        double dj = a.lower(j, j).real();
        for (int k = k0; k < j; ++k) {
            const Complex ljk = l_.lower(j, k);
            work[static_cast<std::size_t>(k - k0)] = ljk * d_[static_cast<std::size_t>(k)];
            dj -= std::norm(ljk) * d_[static_cast<std::size_t>(k)];
        }
        if (dj == 0.0 || !std::isfinite(dj)) throw SingularShift(shift_for_errors);
        d_[static_cast<std::size_t>(j)] = dj;
        const int last = std::min(n - 1, j + kd);
        for (int i = j + 1; i <= last; ++i) {
            Complex s = a.lower(i, j);
            for (int k = std::max(k0, i - kd); k < j; ++k) s -= l_.lower(i, k) * std::conj(work[static_cast<std::size_t>(k - k0)]);
            l_.lower(i, j) = s / dj;
        }
    }
}

int BandedLdl::negative_pivots() const {
    return static_cast<int>(std::count_if(d_.begin(), d_.end(), [](double v) { return v < 0.0; }));
}

double BandedLdl::min_abs_pivot() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : d_) m = std::min(m, std::abs(v));
    return m;
}

Vector BandedLdl::solve(const Vector& b) const {
    const int n = l_.size();
    const int kd = l_.bandwidth();
    Vector x = b;
    for (int i = 0; i < n; ++i) {
        for (int k = std::max(0, i - kd); k < i; ++k) x[i] -= l_.lower(i, k) * x[k];
    }
    for (int i = 0; i < n; ++i) x[i] /= d_[static_cast<std::size_t>(i)];
    for (int i = n - 1; i >= 0; --i) {
        const int last = std::min(n - 1, i + kd);
        for (int k = i + 1; k <= last; ++k) x[i] -= std::conj(l_.lower(k, i)) * x[k];
    }
    return x;
}

}  // namespace locspec
