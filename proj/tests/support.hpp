#pragma once

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/QR>

#include "locspec/potential.hpp"

namespace locspec::testing {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

// Small hand-rolled generators for property tests; fixed seeds keep failures reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g_); }
    Complex complex(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

    Matrix hermitian(int m, double scale = 1.0, bool real = false) {
        Matrix a(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) a(i, j) = real ? Complex(uniform(-scale, scale), 0.0) : complex(scale);
        }
        return 0.5 * (a + a.adjoint());
    }

    Matrix unitary(int m) {
        Matrix a(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) a(i, j) = complex();
        }
        Eigen::HouseholderQR<Matrix> qr(a);
        return qr.householderQ() * Matrix::Identity(m, m);
    }

    // Piecewise polynomial Q on [lo, hi] with up to three pieces, degree <= 3, and up to two jumps.
    HermitianPotential potential(int m, double lo, double hi, bool real = false) {
        const int pieces = integer(1, 3);
        std::vector<double> cuts{lo};
        for (int i = 1; i < pieces; ++i) cuts.push_back(lo + (hi - lo) * (i + uniform(-0.3, 0.3)) / pieces);
        cuts.push_back(hi);
        std::vector<HermitianPotential::PieceSpec> specs;
        for (int i = 0; i < pieces; ++i) {
            std::vector<Matrix> coeffs;
            const int degree = integer(0, 3);
            for (int d = 0; d <= degree; ++d) coeffs.push_back(hermitian(m, 2.0, real));
            specs.push_back({cuts[static_cast<std::size_t>(i)], cuts[static_cast<std::size_t>(i) + 1], coeffs,
                             0.5 * (cuts[static_cast<std::size_t>(i)] + cuts[static_cast<std::size_t>(i) + 1])});
        }
        std::vector<PotentialJump> jumps;
        const int njumps = integer(0, 2);
        for (int j = 0; j < njumps; ++j) jumps.push_back({uniform(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo)), hermitian(m, 3.0, real)});
        return HermitianPotential::from_polynomial_pieces(m, specs, jumps);
    }

private:
    std::mt19937_64 g_;
};

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

// Q = c x^3 / 3 on the whole line (q = c x^2).
inline HermitianPotential cubic(double c) {
    return HermitianPotential::from_polynomial_pieces(
        1, {{-kInf, kInf, {scalar(0), scalar(0), scalar(0), scalar(c / 3.0)}, std::nullopt}});
}

}  // namespace locspec::testing
