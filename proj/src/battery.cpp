#include "locspec/battery.hpp"

#include <cmath>
#include <limits>

namespace locspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

HermitianPotential cubic(double c) {
    // q = c x^2, Q = c x^3 / 3
    return HermitianPotential::from_polynomial_pieces(
        1, {{-kInf, kInf, {Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Constant(1, 1, c / 3.0)},
             std::nullopt}});
}

HermitianPotential comb() {
    return HermitianPotential::delta_comb(1, {0.0}, {Matrix::Constant(1, 1, -5.0)}, Periodicity{1.0, 0.0});
}

}  // namespace

std::vector<NamedPotential> identity_battery() {
    const HermitianPotential constant = shifted(HermitianPotential::zero(1), 3.0);
    const HermitianPotential sum = direct_sum(constant, cubic(1.0));
    Matrix u(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    u << Complex(s, 0.0), Complex(0.0, s), Complex(0.0, s), Complex(s, 0.0);
    return {
        {"zero", HermitianPotential::zero(1)},
        {"constant", constant},
        {"delta_comb", comb()},
        {"x_squared", cubic(1.0)},
        {"direct_sum", sum},
        {"conjugated_sum", conjugated(sum, u)},
    };
}

std::vector<TestFunction> identity_test_functions(int dimension) {
    const auto m = static_cast<Eigen::Index>(dimension);
    Vector a1 = Vector::Ones(m);
    Vector a2(m);
    Vector a3(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        a2[i] = Complex(0.5 + static_cast<double>(i), -0.25);
        a3[i] = Complex(-1.0, 0.75 * static_cast<double>(i + 1));
    }
    return {
        bump_function({-0.7, 1.3}, a1, 0.0),
        bump_function({0.2, 2.9}, a2, 3.0),
        bump_function({-1.6, 0.45}, a3, -2.0),
    };
}

std::vector<IdentityRow> run_identity_battery(const std::vector<NamedPotential>& battery, double ell,
                                              IdentityQuadrature quad) {
    const PartitionFunction pf(ell);
    std::vector<IdentityRow> rows;
    for (const auto& entry : battery) {
        const auto functions = identity_test_functions(entry.potential.dimension());
        for (std::size_t i = 0; i < functions.size(); ++i) {
            IdentityRow row;
            row.potential = entry.name;
            row.test_function = static_cast<int>(i);
            row.localization = localization_residual(entry.potential, pf, functions[i], quad);
            row.parseval = parseval_residual(pf, functions[i], quad);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<NamedPotential> localization_battery() {
    return {
        {"zero", HermitianPotential::zero(1)},
        {"x_squared", cubic(1.0)},
        {"minus_x_squared", cubic(-1.0)},
        {"periodic_delta_comb", comb()},
    };
}

}  // namespace locspec
