#include "locspec/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "locspec/errors.hpp"
#include "locspec/quadrature.hpp"

namespace locspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDefaultKappaGrid = 10000;
constexpr double kGoldenTol = 1e-10;

// Integration nodes and weights for the identity checks.
struct Panels {
    std::vector<double> x;
    std::vector<double> w;
};

Panels build_panels(const HermitianPotential* potential, Interval support, double ell, IdentityQuadrature quad) {
    const double half = 0.5 * ell;
    std::vector<double> cuts{support.lo, support.hi};
    const long k0 = static_cast<long>(std::floor(support.lo / half));
    const long k1 = static_cast<long>(std::ceil(support.hi / half));
    for (long k = k0; k <= k1; ++k) {
        const double c = static_cast<double>(k) * half;
        if (c > support.lo && c < support.hi) cuts.push_back(c);
    }
    if (potential != nullptr) {
        for (double b : potential->breakpoints_in(support)) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const GaussRule& rule = gauss_legendre(quad.points_per_panel);
    const double max_width = half / quad.panels_per_half_window;
    Panels out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
        for (int j = 0; j < n; ++j) {
            const double pa = a + (b - a) * j / n;
            const double pb = a + (b - a) * (j + 1) / n;
            const double mid = 0.5 * (pa + pb);
            const double rad = 0.5 * (pb - pa);
            for (int q = 0; q < rule.size(); ++q) {
                out.x.push_back(mid + rad * rule.nodes[q]);
                out.w.push_back(rad * rule.weights[q]);
            }
        }
    }
    return out;
}

void require_compact(const TestFunction& y) {
    if (!std::isfinite(y.support.lo) || !std::isfinite(y.support.hi) || !(y.support.lo < y.support.hi)) {
        throw DomainError("test function must have compact support");
    }
    if (!y.value || !y.derivative) throw DomainError("test function is missing value or derivative");
}

// (f', f') - (Q f, f') - (Q f', f), real part; (a, b) = b^dagger a.
double form_density(const Matrix& q, const Vector& f, const Vector& df) {
    const double kinetic = df.squaredNorm();
    const Complex coupling = df.dot(q * f);  // (Qf, f')
    return kinetic - 2.0 * coupling.real();
}

// Range of k for which theta_k or theta_{k+1} meets the support.
std::pair<long, long> k_range(const PartitionFunction& pf, Interval support) {
    const double half = 0.5 * pf.ell();
    return {static_cast<long>(std::floor(support.lo / half)) - 2, static_cast<long>(std::ceil(support.hi / half)) + 1};
}

}  // namespace

PartitionFunction::PartitionFunction(double ell) : ell_(ell), half_(0.5 * ell), kappa_(0.0) {
    if (!(ell > 0.0) || !std::isfinite(ell)) throw DomainError("window length ell must be positive and finite");
    kappa_ = kappa_on_grid(kDefaultKappaGrid);
}

double PartitionFunction::exponent(double x, double& dexponent) const {
    dexponent = 0.0;
    if (!(x > 0.0 && x < ell_)) return kInf;
    const double s = x < half_ ? x + half_ : x - half_;
    const double px = x * (ell_ - x);
    double g = 1.0 / px;
    dexponent = -(ell_ - 2.0 * x) / (px * px);
    if (s > 0.0 && s < ell_) {
        const double ps = s * (ell_ - s);
        g -= 1.0 / ps;
        dexponent += (ell_ - 2.0 * s) / (ps * ps);
    } else {
        dexponent = 0.0;
        return -kInf;
    }
    return g;
}

double PartitionFunction::theta(double x) const {
    double dg = 0.0;
    const double g = exponent(x, dg);
    if (g == kInf) return 0.0;
    if (g == -kInf) return 1.0;
    return 1.0 / std::sqrt(1.0 + std::exp(2.0 * g));
}

double PartitionFunction::theta_prime(double x) const {
    double dg = 0.0;
    const double g = exponent(x, dg);
    if (!std::isfinite(g)) return 0.0;
    // theta' = -g' E / (1 + E)^{3/2}, E = exp(2 g); rewritten to avoid overflow for g > 0.
    double factor;
    if (g > 0.0) {
        const double e = std::exp(-2.0 * g);
        factor = std::exp(-g) / std::pow(1.0 + e, 1.5);
    } else {
        const double e = std::exp(2.0 * g);
        factor = e / std::pow(1.0 + e, 1.5);
    }
    if (factor == 0.0 || !std::isfinite(dg)) return 0.0;
    return -dg * factor;
}

double PartitionFunction::identity_deviation(int samples) const {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double x = half_ + half_ * static_cast<double>(i) / (samples - 1);
        const double a = theta(x);
        const double b = theta(x - half_);
        worst = std::max(worst, std::abs(a * a + b * b - 1.0));
    }
    return worst;
}

double PartitionFunction::kappa_on_grid(int grid_points) const {
    if (grid_points < 3) throw DomainError("kappa grid needs at least 3 points");
    const double h = ell_ / (grid_points - 1);
    int best = 0;
    double best_value = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double v = std::abs(theta_prime(h * i));
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    // Golden-section maximization of |theta'| on the two neighbouring grid cells.
    double a = std::max(0.0, h * (best - 1));
    double b = std::min(ell_, h * (best + 1));
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = std::abs(theta_prime(c));
    double fd = std::abs(theta_prime(d));
    while (b - a > kGoldenTol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = std::abs(theta_prime(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = std::abs(theta_prime(d));
        }
    }
    return std::max({best_value, fc, fd, std::abs(theta_prime(0.5 * (a + b)))});
}

TestFunction bump_function(Interval support, Vector amplitude, double frequency) {
    if (!(support.lo < support.hi) || !std::isfinite(support.lo) || !std::isfinite(support.hi)) {
        throw DomainError("bump support must be a finite nonempty interval");
    }
    const double center = 0.5 * (support.lo + support.hi);
    const double radius = 0.5 * (support.hi - support.lo);
    const auto m = static_cast<int>(amplitude.size());
    // b(t) = exp(-1/(1 - t^2)), t = (x - center)/radius
    auto profile = [=](double x, double& dprofile) {
        const double t = (x - center) / radius;
        dprofile = 0.0;
        if (!(std::abs(t) < 1.0)) return 0.0;
        const double r = 1.0 - t * t;
        const double b = std::exp(-1.0 / r);
        dprofile = b * (-2.0 * t / (r * r)) / radius;
        return b;
    };
    TestFunction f;
    f.dimension = m;
    f.support = support;
    f.value = [=](double x) -> Vector {
        double db = 0.0;
        const double b = profile(x, db);
        return amplitude * (b * std::exp(Complex(0.0, frequency * x)));
    };
    f.derivative = [=](double x) -> Vector {
        double db = 0.0;
        const double b = profile(x, db);
        const Complex phase = std::exp(Complex(0.0, frequency * x));
        return amplitude * ((db + Complex(0.0, frequency) * b) * phase);
    };
    return f;
}

LocalizedValue u_k(const PartitionFunction& pf, long k, const TestFunction& y, double x) {
    const double t = pf.theta_k(k, x);
    if (t == 0.0) return {Vector::Zero(y.dimension), Vector::Zero(y.dimension)};
    const double dt = pf.theta_k_prime(k, x);
    const Vector v = y.value(x);
    return {t * t * v, 2.0 * t * dt * v + t * t * y.derivative(x)};
}

LocalizedValue v_k(const PartitionFunction& pf, long k, const TestFunction& y, double x) {
    const double a = pf.theta_k(k, x);
    const double b = pf.theta_k(k + 1, x);
    if (a == 0.0 || b == 0.0) return {Vector::Zero(y.dimension), Vector::Zero(y.dimension)};
    const double da = pf.theta_k_prime(k, x);
    const double db = pf.theta_k_prime(k + 1, x);
    const Vector v = y.value(x);
    return {a * b * v, (da * b + a * db) * v + a * b * y.derivative(x)};
}

IdentityCheck localization_residual(const HermitianPotential& potential, const PartitionFunction& pf,
                              const TestFunction& y, IdentityQuadrature quad) {
    require_compact(y);
    if (y.dimension != potential.dimension()) throw DomainError("test function and potential dimensions differ");
    const Panels panels = build_panels(&potential, y.support, pf.ell(), quad);
    const auto [k0, k1] = k_range(pf, y.support);

    double lhs = 0.0;
    double sum_u = 0.0;
    double sum_v = 0.0;
    double sum_cross = 0.0;
    for (std::size_t i = 0; i < panels.x.size(); ++i) {
        const double x = panels.x[i];
        const double w = panels.w[i];
        const Matrix q = potential.at(x);
        const Vector yv = y.value(x);
        lhs += w * form_density(q, yv, y.derivative(x));
        for (long k = k0; k <= k1; ++k) {
            const LocalizedValue u = u_k(pf, k, y, x);
            sum_u += w * form_density(q, u.value, u.derivative);
            const LocalizedValue v = v_k(pf, k, y, x);
            sum_v += w * form_density(q, v.value, v.derivative);
            // The cross term lives on [k ell/2 + ell/2, k ell/2 + ell], where theta_k theta_{k+1} != 0.
            const double a = pf.theta_k(k, x);
            const double b = pf.theta_k(k + 1, x);
            if (a != 0.0 && b != 0.0) {
                const double wr = pf.theta_k_prime(k, x) * b - a * pf.theta_k_prime(k + 1, x);
                sum_cross += w * wr * wr * yv.squaredNorm();
            }
        }
    }
    IdentityCheck out;
    out.lhs = lhs;
    out.rhs = sum_u + 2.0 * sum_v - 2.0 * sum_cross;
    out.residual = std::abs(out.lhs - out.rhs) / (1.0 + std::abs(out.lhs));
    return out;
}

IdentityCheck parseval_residual(const PartitionFunction& pf, const TestFunction& y, IdentityQuadrature quad) {
    require_compact(y);
    const Panels panels = build_panels(nullptr, y.support, pf.ell(), quad);
    const auto [k0, k1] = k_range(pf, y.support);
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t i = 0; i < panels.x.size(); ++i) {
        const double x = panels.x[i];
        const double w = panels.w[i];
        lhs += w * y.value(x).squaredNorm();
        for (long k = k0; k <= k1; ++k) {
            rhs += w * u_k(pf, k, y, x).value.squaredNorm();
            rhs += 2.0 * w * v_k(pf, k, y, x).value.squaredNorm();
        }
    }
    return {lhs, rhs, std::abs(lhs - rhs) / (1.0 + std::abs(lhs))};
}

double form_of_function(const HermitianPotential& potential, const TestFunction& y, double ell_hint,
                        IdentityQuadrature quad) {
    require_compact(y);
    const Panels panels = build_panels(&potential, y.support, ell_hint, quad);
    double t = 0.0;
    for (std::size_t i = 0; i < panels.x.size(); ++i) {
        const double x = panels.x[i];
        t += panels.w[i] * form_density(potential.at(x), y.value(x), y.derivative(x));
    }
    return t;
}

}  // namespace locspec
