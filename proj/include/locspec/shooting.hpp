#pragma once

#include <functional>
#include <optional>

#include "locspec/potential.hpp"

namespace locspec {

/// Solution of -y^[2] = lambda y written as the first-order system
///   y' = Q y + y1,   y1' = -(Q^2 + lambda) y - Q y1,
/// where y1 = y' - Q y is the quasiderivative. Columns may hold several independent solutions.
struct QuasiState {
    Matrix y;   // m x k
    Matrix y1;  // m x k

    static QuasiState dirichlet_start(int m);  // y = 0, y1 = I
};

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double min_step = 1e-14;  // relative to the segment length
    long max_steps = 2'000'000;
};

/// Observer called after every accepted step and at every breakpoint (before and after).
using StepObserver = std::function<void(double x, const QuasiState&)>;

/// Integrates the system over (a, b), restarting exactly at each breakpoint of Q with (y, y1)
/// carried continuously. Throws IntegrationFailure on step-size underflow.
QuasiState propagate(const HermitianPotential& potential, double lambda, Interval iv, QuasiState initial,
                     IntegratorOptions opts = {}, const StepObserver& observer = nullptr);

/// det Y(b) for the fundamental solutions with Y(a) = 0, Y1(a) = I; zero exactly at Dirichlet
/// eigenvalues.
Complex dirichlet_det(const HermitianPotential& potential, double lambda, Interval iv, IntegratorOptions opts = {});

struct OracleCheck {
    enum class Mode { sign_change, modulus_dip };
    Mode mode = Mode::sign_change;
    bool bracketed = false;
    double refined_lambda = 0.0;  // bisected root (sign_change) or grid minimizer of |det| (modulus_dip)
    double det_at_refined = 0.0;
};

struct OracleOptions {
    int scan_points = 65;
    double root_tol = 1e-10;
    IntegratorOptions integrator{1e-12, 1e-14};
};

/// Scans dirichlet_det on [candidate - window, candidate + window] and bisects the sign change
/// nearest to the candidate. For complex (non real-symmetric) Q with m >= 2 the determinant is not
/// real; the check then only reports the minimum of |det| on the scan grid and bracketed = false.
OracleCheck oracle_check(const HermitianPotential& potential, Interval iv, double candidate, double window,
                         OracleOptions opts = {});

}  // namespace locspec
