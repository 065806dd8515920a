#pragma once

#include <functional>

#include "locspec/potential.hpp"
#include "locspec/types.hpp"

namespace locspec {

/// Smooth cut-off theta with supp theta = [0, ell] and theta^2(x) + theta^2(x - ell/2) = 1 on
/// [ell/2, ell], built from the bump eta0(x) = exp(-1/(x (ell - x))).
///
/// theta(x) = eta0(x) / sqrt(eta(x) + eta(x - ell/2)) with eta the ell-periodic extension of
/// eta0^2. Internally evaluated as 1/sqrt(1 + exp(2 g)) so the tails never underflow into 0/0.
class PartitionFunction {
public:
    /// Throws DomainError unless ell > 0.
    explicit PartitionFunction(double ell);

    double ell() const { return ell_; }
    /// max |theta'| over [0, ell].
    double kappa() const { return kappa_; }

    double theta(double x) const;
    double theta_prime(double x) const;

    /// theta_k(x) = theta(x - k ell / 2).
    double theta_k(long k, double x) const { return theta(x - static_cast<double>(k) * half_); }
    double theta_k_prime(long k, double x) const { return theta_prime(x - static_cast<double>(k) * half_); }

    /// sup over `samples` uniform points of [ell/2, ell] of |theta^2(x) + theta^2(x - ell/2) - 1|.
    double identity_deviation(int samples = 10000) const;

    /// Dense-grid maximum of |theta'| with golden-section polish around the best grid point.
    double kappa_on_grid(int grid_points) const;

private:
    // g(x) with theta = 1/sqrt(1 + exp(2 g)); +inf outside (0, ell), -inf where the partner vanishes.
    double exponent(double x, double& dexponent) const;

    double ell_;
    double half_;
    double kappa_;
};

/// Smooth compactly supported vector function with its derivative.
struct TestFunction {
    int dimension = 1;
    Interval support;
    std::function<Vector(double)> value;
    std::function<Vector(double)> derivative;
};

/// amplitude * b(x) * exp(i frequency x), where b is the standard bump on `support`.
TestFunction bump_function(Interval support, Vector amplitude, double frequency = 0.0);

/// Pointwise u_k = theta_k^2 y and v_k = theta_k theta_{k+1} y, plus their derivatives.
struct LocalizedValue {
    Vector value;
    Vector derivative;
};
LocalizedValue u_k(const PartitionFunction& pf, long k, const TestFunction& y, double x);
LocalizedValue v_k(const PartitionFunction& pf, long k, const TestFunction& y, double x);

struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;  // |lhs - rhs| / (1 + |lhs|)
};

/// Quadrature shared by both sides of the identities: composite Gauss-Legendre on panels that
/// respect supp y, the points k ell / 2 and the breakpoints of Q.
struct IdentityQuadrature {
    int points_per_panel = 12;
    int panels_per_half_window = 32;
};

/// Both sides of the localization identity
///   t[y] = sum_k t[u_k] + 2 sum_k t[v_k] - 2 sum_k int (theta_k' theta_{k+1} - theta_k theta_{k+1}')^2 |y|^2,
/// where t[f] = int (f', f') - (Q f, f') - (Q f', f).
IdentityCheck localization_residual(const HermitianPotential& potential, const PartitionFunction& pf,
                              const TestFunction& y, IdentityQuadrature quad = {});

/// Both sides of <y, y> = sum_k <u_k, u_k> + 2 sum_k <v_k, v_k>.
IdentityCheck parseval_residual(const PartitionFunction& pf, const TestFunction& y, IdentityQuadrature quad = {});

/// t[y] evaluated directly by quadrature on exact function values.
double form_of_function(const HermitianPotential& potential, const TestFunction& y, double ell_hint = 1.0,
                        IdentityQuadrature quad = {});

}  // namespace locspec
