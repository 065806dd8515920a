#include "locspec/shooting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "locspec/errors.hpp"

namespace locspec {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920, kE5 = -17253.0 / 339200,
                 kE6 = 22.0 / 525, kE7 = -1.0 / 40;

// Right-hand side on one breakpoint-free segment; the state stacks y over y1.
class SegmentSystem {
public:
    SegmentSystem(PolyMatrix q, double lambda) : q_(std::move(q)), q2_(q_.squared()), lambda_(lambda) {}

    Matrix operator()(double x, const Matrix& s) const {
        const auto m = q_.dimension();
        const Matrix q = q_(x);
        const Matrix q2 = q2_(x);
        const auto y = s.topRows(m);
        const auto y1 = s.bottomRows(m);
        Matrix out(s.rows(), s.cols());
        out.topRows(m) = q * y + y1;
        out.bottomRows(m) = -(q2 * y) - lambda_ * y - q * y1;
        return out;
    }

private:
    PolyMatrix q_;
    PolyMatrix q2_;
    double lambda_;
};

Matrix stack(const QuasiState& st) {
    Matrix s(st.y.rows() * 2, st.y.cols());
    s.topRows(st.y.rows()) = st.y;
    s.bottomRows(st.y.rows()) = st.y1;
    return s;
}

QuasiState unstack(const Matrix& s, int m) { return {s.topRows(m), s.bottomRows(m)}; }

// Advances s from a to b; h carries the step size between segments.
void integrate_segment(const SegmentSystem& f, double a, double b, Matrix& s, double& h, int m,
                       const IntegratorOptions& opts, const StepObserver& observer, long& steps) {
    const double length = b - a;
    const double h_min = opts.min_step * std::max(length, 1e-300);
    if (!(h > 0.0)) h = length / 64.0;
    h = std::min(h, length);
    double x = a;
    Matrix k1 = f(x, s);
    while (x < b) {
        const bool last = x + h >= b;
        const double step = last ? b - x : h;
        const Matrix k2 = f(x + kC[1] * step, s + step * (kA21 * k1));
        const Matrix k3 = f(x + kC[2] * step, s + step * (kA31 * k1 + kA32 * k2));
        const Matrix k4 = f(x + kC[3] * step, s + step * (kA41 * k1 + kA42 * k2 + kA43 * k3));
        const Matrix k5 = f(x + kC[4] * step, s + step * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
        const Matrix k6 =
            f(x + kC[5] * step, s + step * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
        const Matrix next = s + step * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
        const double x_next = last ? b : x + step;
        const Matrix k7 = f(x_next, next);
        const Matrix err = step * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

        double ratio = 0.0;
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            for (Eigen::Index i = 0; i < s.rows(); ++i) {
                const double scale = opts.abs_tol + opts.rel_tol * std::max(std::abs(s(i, j)), std::abs(next(i, j)));
                ratio = std::max(ratio, std::abs(err(i, j)) / scale);
            }
        }
        if (++steps > opts.max_steps) {
            throw IntegrationFailure("integrator exceeded the step budget", x);
        }
        const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
        if (ratio <= 1.0) {
            x = x_next;
            s = next;
            k1 = k7;
            if (observer) observer(x, unstack(s, m));
            if (!last) h = step * factor;
        } else {
            h = step * factor;
            if (h < h_min) {
                std::ostringstream msg;
                msg << "step size underflow at x = " << x;
                throw IntegrationFailure(msg.str(), x);
            }
        }
    }
}

}  // namespace

QuasiState QuasiState::dirichlet_start(int m) { return {Matrix::Zero(m, m), Matrix::Identity(m, m)}; }

QuasiState propagate(const HermitianPotential& potential, double lambda, Interval iv, QuasiState initial,
                     IntegratorOptions opts, const StepObserver& observer) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
        throw DomainError("propagation interval must be finite and nonempty");
    }
    if (!potential.covers(iv)) throw DomainError("propagation interval leaves the support of Q");
    const int m = potential.dimension();
    if (initial.y.rows() != m || initial.y1.rows() != m || initial.y.cols() != initial.y1.cols()) {
        throw DomainError("initial state has wrong shape");
    }
    if (!initial.y.allFinite() || !initial.y1.allFinite()) throw DomainError("initial state must be finite");

    std::vector<double> cuts{iv.lo};
    for (double b : potential.breakpoints_in(iv)) cuts.push_back(b);
    cuts.push_back(iv.hi);

    Matrix s = stack(initial);
    double h = 0.0;
    long steps = 0;
    if (observer) observer(iv.lo, initial);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const SegmentSystem f(potential.segment({cuts[i], cuts[i + 1]}), lambda);
        integrate_segment(f, cuts[i], cuts[i + 1], s, h, m, opts, observer, steps);
    }
    return unstack(s, m);
}

Complex dirichlet_det(const HermitianPotential& potential, double lambda, Interval iv, IntegratorOptions opts) {
    const QuasiState end = propagate(potential, lambda, iv, QuasiState::dirichlet_start(potential.dimension()), opts);
    return end.y.determinant();
}

OracleCheck oracle_check(const HermitianPotential& potential, Interval iv, double candidate, double window,
                         OracleOptions opts) {
    if (!(window > 0.0)) throw DomainError("oracle window must be positive");
    if (opts.scan_points < 2) throw DomainError("oracle scan needs at least two points");
    OracleCheck out;
    out.refined_lambda = candidate;
    const bool real_det = potential.dimension() == 1 || potential.is_real_symmetric();
    out.mode = real_det ? OracleCheck::Mode::sign_change : OracleCheck::Mode::modulus_dip;

    const int n = opts.scan_points;
    std::vector<double> lam(static_cast<std::size_t>(n));
    std::vector<Complex> det(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        lam[static_cast<std::size_t>(i)] = candidate - window + 2.0 * window * i / (n - 1);
        det[static_cast<std::size_t>(i)] = dirichlet_det(potential, lam[static_cast<std::size_t>(i)], iv, opts.integrator);
    }

    if (!real_det) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < det.size(); ++i) {
            if (std::abs(det[i]) < std::abs(det[best])) best = i;
        }
        out.refined_lambda = lam[best];
        out.det_at_refined = std::abs(det[best]);
        return out;
    }

    // Sign change nearest to the candidate.
    std::optional<std::size_t> pick;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < det.size(); ++i) {
        const double d0 = det[i].real();
        const double d1 = det[i + 1].real();
        if (d0 == 0.0 || d0 * d1 < 0.0) {
            const double distance = std::abs(0.5 * (lam[i] + lam[i + 1]) - candidate);
            if (distance < best_distance) {
                best_distance = distance;
                pick = i;
            }
        }
    }
    if (!pick) return out;

    double lo = lam[*pick];
    double hi = lam[*pick + 1];
    double f_lo = det[*pick].real();
    if (f_lo == 0.0) {
        out.bracketed = true;
        out.refined_lambda = lo;
        return out;
    }
    while (hi - lo > opts.root_tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = dirichlet_det(potential, mid, iv, opts.integrator).real();
        if (f_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    out.bracketed = true;
    out.refined_lambda = 0.5 * (lo + hi);
    out.det_at_refined = dirichlet_det(potential, out.refined_lambda, iv, opts.integrator).real();
    return out;
}

}  // namespace locspec
