#include "locspec/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "locspec/errors.hpp"

namespace locspec {

namespace {

constexpr int kMaxBisection = 400;
constexpr int kMaxShiftRetries = 8;
constexpr int kMaxInverseIterations = 30;

struct RowBounds {
    double lo;
    double hi;
};

// Gershgorin disc extremes of a Hermitian banded matrix.
RowBounds gershgorin(const BandedHermitian& a) {
    const int n = a.size();
    const int kd = a.bandwidth();
    std::vector<double> radius(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        for (int i = j + 1; i <= std::min(n - 1, j + kd); ++i) {
            const double v = std::abs(a.lower(i, j));
            radius[static_cast<std::size_t>(i)] += v;
            radius[static_cast<std::size_t>(j)] += v;
        }
    }
    RowBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < n; ++i) {
        const double d = a.lower(i, i).real();
        b.lo = std::min(b.lo, d - radius[static_cast<std::size_t>(i)]);
        b.hi = std::max(b.hi, d + radius[static_cast<std::size_t>(i)]);
    }
    return b;
}

void require_positive_mass(const FormPencil& pencil) {
    if (pencil.size() == 0) throw PencilError("pencil has no unknowns (mesh has no interior nodes)");
    try {
        BandedLdl ldl(pencil.mass);
        if (ldl.negative_pivots() > 0) throw PencilError("mass matrix is not positive definite");
    } catch (const SingularShift&) {
        throw PencilError("mass matrix is singular");
    }
}

// Inertia count that steps off exact singularities.
int robust_count(const FormPencil& pencil, double& sigma, double perturbation) {
    for (int attempt = 0; attempt <= kMaxShiftRetries; ++attempt) {
        try {
            return count_below(pencil, sigma);
        } catch (const SingularShift&) {
            sigma -= perturbation * (attempt + 1);
        }
    }
    throw PencilError("factorization stayed singular after shift perturbations");
}

}  // namespace

int count_below(const FormPencil& pencil, double sigma) {
    const BandedHermitian shifted = pencil.stiffness.shifted_by(pencil.mass, sigma);
    return BandedLdl(shifted, sigma).negative_pivots();
}

SpectrumBracket initial_bracket(const FormPencil& pencil) {
    require_positive_mass(pencil);
    const RowBounds ga = gershgorin(pencil.stiffness);
    const RowBounds gm = gershgorin(pencil.mass);
    const int n = pencil.size();

    // Upper bound: Rayleigh quotients of unit vectors and of the all-ones vector.
    double hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) hi = std::min(hi, pencil.stiffness.lower(i, i).real() / pencil.mass.lower(i, i).real());
    hi = std::min(hi, rayleigh(pencil, Vector::Ones(n)));

    double lo;
    if (ga.lo >= 0.0) {
        lo = ga.lo / gm.hi;
    } else if (gm.lo > 0.0) {
        lo = ga.lo / gm.lo;
    } else {
        double min_diag = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) min_diag = std::min(min_diag, pencil.mass.lower(i, i).real());
        lo = ga.lo / min_diag;
    }
    lo = std::min(lo, hi);
    // Certify: no eigenvalue strictly below lo.
    double step = 1.0 + std::abs(lo);
    const double perturb = std::max(kDefaultEigenTol, 1e-14 * pencil.stiffness.max_abs());
    for (int guard = 0; guard < 200; ++guard) {
        double s = lo;
        if (robust_count(pencil, s, perturb) == 0) {
            lo = s;
            return {lo, std::max(lo, hi)};
        }
        lo -= step;
        step *= 2.0;
    }
    throw PencilError("could not bracket the smallest eigenvalue");
}

EigenResult smallest_eigenpair(const FormPencil& pencil, double tol) {
    if (!(tol > 0.0)) throw DomainError("eigen tolerance must be positive");
    SpectrumBracket br = initial_bracket(pencil);
    const double perturb = std::max(tol, 1e-14 * pencil.stiffness.max_abs());

    EigenResult result;
    int steps = 0;
    double lo = br.lo;
    double hi = br.hi;
    while (steps < kMaxBisection && hi - lo > tol * (1.0 + std::max(std::abs(lo), std::abs(hi)))) {
        double mid = 0.5 * (lo + hi);
        ++steps;
        try {
            if (count_below(pencil, mid) >= 1) {
                hi = mid;
            } else {
                lo = mid;
            }
        } catch (const SingularShift&) {
            // mid is an eigenvalue to working precision: some eigenvalue lies in [s, mid].
            double s = std::max(lo, mid - perturb);
            if (robust_count(pencil, s, perturb) >= 1) {
                hi = s;
            } else {
                lo = std::max(lo, s);
                hi = mid;
            }
        }
    }

    // Shift-inverted iteration from just below the spectrum: A - sigma M is positive definite.
    double sigma = lo;
    std::optional<BandedLdl> factor;
    for (int attempt = 0; attempt <= kMaxShiftRetries && !factor; ++attempt) {
        try {
            factor.emplace(pencil.stiffness.shifted_by(pencil.mass, sigma), sigma);
        } catch (const SingularShift&) {
            sigma -= perturb * (attempt + 1);
        }
    }
    if (!factor) throw PencilError("shift-inverted iteration could not factor A - sigma M");

    const int n = pencil.size();
    Vector c(n);
    for (int i = 0; i < n; ++i) c[i] = 1.0 + 0.25 * std::sin(1.3 * i + 0.7);
    double lambda = 0.5 * (lo + hi);
    double previous = std::numeric_limits<double>::infinity();
    int sweeps = 0;
    for (; sweeps < kMaxInverseIterations; ++sweeps) {
        Vector z = factor->solve(pencil.mass.multiply(c));
        const double norm = std::sqrt(z.dot(pencil.mass.multiply(z)).real());
        if (!(norm > 0.0) || !std::isfinite(norm)) throw PencilError("inverse iteration broke down");
        c = z / norm;
        lambda = c.dot(pencil.stiffness.multiply(c)).real();
        if (sweeps >= 1 && std::abs(lambda - previous) <= 1e-3 * tol * (1.0 + std::abs(lambda))) {
            ++sweeps;
            break;
        }
        previous = lambda;
    }

    const Vector mc = pencil.mass.multiply(c);
    result.lambda = lambda;
    result.residual = (pencil.stiffness.multiply(c) - lambda * mc).norm() / mc.norm();
    result.vector = std::move(c);
    result.iterations = steps + sweeps;
    result.mesh_h = pencil.mesh ? pencil.mesh->max_element() : 0.0;
    result.bracket_lo = lo;
    result.bracket_hi = hi;
    return result;
}

}  // namespace locspec
