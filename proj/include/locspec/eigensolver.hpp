#pragma once

#include "locspec/form.hpp"

namespace locspec {

inline constexpr double kDefaultEigenTol = 1e-10;

struct EigenResult {
    double lambda = 0.0;
    Vector vector;          // M-normalized: c^dagger M c = 1
    double residual = 0.0;  // ||A c - lambda M c|| / ||M c||
    int iterations = 0;     // bisection steps + inverse-iteration sweeps
    double mesh_h = 0.0;
    double bracket_lo = 0.0;  // certified: no eigenvalue below
    double bracket_hi = 0.0;  // certified: at least one eigenvalue below
};

/// Number of eigenvalues of A c = lambda M c strictly below sigma (inertia of A - sigma M).
/// Throws SingularShift if the factorization hits an exactly zero pivot.
int count_below(const FormPencil& pencil, double sigma);

/// Bounds [lo, hi] with no eigenvalue below lo and at least one at or below hi.
struct SpectrumBracket {
    double lo;
    double hi;
};
SpectrumBracket initial_bracket(const FormPencil& pencil);

/// Smallest eigenpair to relative tolerance tol (relative to 1 + |lambda|) via inertia bisection
/// followed by shift-inverted iteration. Throws PencilError when M is not positive definite or the
/// pencil is empty.
EigenResult smallest_eigenpair(const FormPencil& pencil, double tol = kDefaultEigenTol);

}  // namespace locspec
