// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "locspec/battery.hpp"
#include "locspec/eigensolver.hpp"
#include "locspec/form.hpp"
#include "locspec/partition.hpp"
#include "locspec/scanner.hpp"
#include "locspec/shooting.hpp"
#include "support.hpp"

using namespace locspec;
using namespace locspec::testing;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double ground(const HermitianPotential& p, Interval iv, double h, double tol = 1e-13) {
    return smallest_eigenpair(assemble(p, build_mesh(p, iv, h)), tol).lambda;
}

Outcome analytic_eigenvalue() {
    Outcome o;
    const auto zero = HermitianPotential::zero(1);
    const WindowValue v = lambda_window(zero, {0, 1.0, 0.0}, {5e-4, 1e-12, true});
    const double raw = std::abs(v.lambda_coarse - kPi * kPi);
    const double ext = std::abs(v.lambda - kPi * kPi);
    o.require(raw < 5e-5, "raw error < 5e-5");
    o.require(ext < 1e-6, "extrapolated error < 1e-6");
    o.note(fmt("raw err %.2e", raw) + fmt(", extrapolated err %.2e", ext));
    return o;
}

Outcome delta_cross_validation() {
    Outcome o;
    for (double alpha : {-10.0, 10.0}) {
        const auto p = HermitianPotential::delta_comb(1, {0.5}, {scalar(alpha)});
        const WindowValue fem = lambda_window(p, {0, 1.0, 0.0}, {1e-3, 1e-12, true});
        const OracleCheck shot = oracle_check(p, {0.0, 1.0}, fem.lambda, 0.5);
        const double diff = std::abs(fem.lambda - shot.refined_lambda);
        o.require(shot.bracketed, "shooting root bracketed for alpha = " + fmt("%g", alpha));
        o.require(diff < 1e-6, "|FEM - shooting| < 1e-6 for alpha = " + fmt("%g", alpha));
        o.note(fmt("alpha %+g: ", alpha) + fmt("lambda %.10f", fem.lambda) + fmt(", diff %.2e", diff));
    }
    return o;
}

Outcome localization_identity() {
    Outcome o;
    const auto battery = identity_battery();
    const auto rows = run_identity_battery(battery, 1.0);
    double local = 0.0, parseval = 0.0;
    for (const auto& r : rows) {
        local = std::max(local, r.localization.residual);
        parseval = std::max(parseval, r.parseval.residual);
    }
    o.require(battery.size() >= 5 && rows.size() >= 15, ">= 5 potentials x 3 test functions");
    o.require(local < 1e-8, "localization residual < 1e-8");
    o.require(parseval < 1e-10, "norm identity residual < 1e-10");
    o.note(std::to_string(rows.size()) + " checks" + fmt(", max localization residual %.2e", local) +
           fmt(", max norm residual %.2e", parseval));
    return o;
}

Outcome theta_identity() {
    Outcome o;
    for (double ell : {0.5, 1.0, 2.0}) {
        const PartitionFunction pf(ell);
        const double dev = pf.identity_deviation(10000);
        const double drift = std::abs(pf.kappa_on_grid(20000) - pf.kappa_on_grid(10000));
        o.require(dev < 1e-12, "identity deviation < 1e-12 at ell = " + fmt("%g", ell));
        o.require(drift < 1e-8, "kappa stable under grid doubling at ell = " + fmt("%g", ell));
        o.note(fmt("ell %g: ", ell) + fmt("dev %.1e", dev) + fmt(", kappa %.12f", pf.kappa()) +
               fmt(", doubling drift %.1e", drift));
    }
    return o;
}

Outcome discrete_symmetries() {
    Outcome o;
    Rng rng(2024);
    double worst_shift = 0.0, worst_gauge = 0.0, worst_unitary = 0.0, worst_sum = 0.0;
    const double h = 0.02;
    std::vector<HermitianPotential> scalars{cubic(1.0), cubic(-1.0),
                                            HermitianPotential::delta_comb(1, {0.0}, {scalar(-5.0)}, Periodicity{1.0, 0.0})};
    for (int i = 0; i < 3; ++i) scalars.push_back(rng.potential(1, -3.0, 3.0, true));
    for (const auto& p : scalars) {
        for (long n : {-4L, -1L, 2L}) {
            const Interval iv = Window{n, 1.0, 0.0}.interval();
            const double base = ground(p, iv, h);
            const double c = rng.uniform(-20.0, 20.0);
            worst_shift = std::max(worst_shift, rel(ground(shifted(p, c), iv, h), base + c));
            worst_gauge = std::max(worst_gauge, rel(ground(gauge_shifted(p, scalar(rng.uniform(-50.0, 50.0))), iv, h), base));
        }
    }
    for (int trial = 0; trial < 6; ++trial) {
        const int m = rng.integer(2, 3);
        const auto p = rng.potential(m, -3.0, 3.0);
        const Interval iv{-1.0, 0.0};
        const double base = ground(p, iv, h);
        worst_shift = std::max(worst_shift, rel(ground(shifted(p, 3.5), iv, h), base + 3.5));
        worst_gauge = std::max(worst_gauge, rel(ground(gauge_shifted(p, rng.hermitian(m, 10.0)), iv, h), base));
        worst_unitary = std::max(worst_unitary, rel(ground(conjugated(p, rng.unitary(m)), iv, h), base));
    }
    for (int trial = 0; trial < 6; ++trial) {
        const auto a = scalars[static_cast<std::size_t>(rng.integer(0, 5))];
        const auto b = scalars[static_cast<std::size_t>(rng.integer(0, 5))];
        const bool same_kind = a.periodicity().has_value() == b.periodicity().has_value();
        if (!same_kind) continue;
        const auto sum = direct_sum(a, b);
        const Mesh mesh = build_mesh(sum, {-0.5, 0.5}, h);
        const auto on = [&](const HermitianPotential& p) { return smallest_eigenpair(assemble(p, mesh), 1e-13).lambda; };
        worst_sum = std::max(worst_sum, rel(on(sum), std::min(on(a), on(b))));
    }
    o.require(worst_shift < 1e-12, "(a) shift");
    o.require(worst_gauge < 1e-12, "(b) gauge");
    o.require(worst_unitary < 1e-10, "(c) unitary");
    o.require(worst_sum < 1e-9, "(d) direct sum");
    o.note(fmt("shift %.1e", worst_shift) + fmt(", gauge %.1e", worst_gauge) + fmt(", unitary %.1e", worst_unitary) +
           fmt(", direct sum %.1e", worst_sum));
    return o;
}

Outcome monotonicity() {
    Outcome o;
    Rng rng(77);
    double worst_rise = -1e300;
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = rng.potential(rng.integer(1, 2), 0.0, 1.0);
        Mesh mesh = build_mesh(p, {0.0, 1.0}, 0.1);
        double previous = smallest_eigenpair(assemble(p, mesh), 1e-13).lambda;
        for (int level = 0; level < 4; ++level) {
            mesh = refine(mesh);
            const double next = smallest_eigenpair(assemble(p, mesh), 1e-13).lambda;
            worst_rise = std::max(worst_rise, (next - previous) / (1.0 + std::abs(previous)));
            previous = next;
        }
    }
    o.require(worst_rise <= 1e-12, "refinement never raises lambda_h");

    bool bound_ok = true;
    ScanOptions so;
    so.window = {0.02, 1e-10, false};
    for (const auto& np : localization_battery()) {
        double previous = 1e300;
        for (long r = 1; r <= 12; r += 1) {
            const double b = scan(np.potential, 1.0, -r, r, 0.0, so).global_lower_bound;
            bound_ok = bound_ok && b <= previous;
            previous = b;
        }
    }
    o.require(bound_ok, "enlarging the range never raises the bound");

    bool count_ok = true;
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = rng.potential(rng.integer(1, 3), 0.0, 1.0);
        const FormPencil fp = assemble(p, build_mesh(p, {0.0, 1.0}, 0.05));
        int previous = 0;
        for (int i = 0; i <= 400; ++i) {
            const int c = count_below(fp, -300.0 + i * 2.0);
            count_ok = count_ok && c >= previous;
            previous = c;
        }
    }
    o.require(count_ok, "count_below nondecreasing in sigma");
    o.note(fmt("max relative rise under refinement %.1e", worst_rise));
    return o;
}

Outcome localization() {
    Outcome o;
    ScanOptions so;
    so.window = {0.01, 1e-10, true};
    so.workers = 0;
    std::map<std::string, std::string> base;
    for (const auto& np : localization_battery()) {
        const ScanReport r = scan(np.potential, 1.0, -20, 20, 0.0, so);
        const Diagnosis d = diagnose(r);
        base[np.name] = d.verdict;
        if (np.name == "periodic_delta_comb") {
            double worst = 0.0;
            for (std::size_t i = 0; i + 2 < r.entries.size(); ++i) {
                worst = std::max(worst, std::abs(r.entries[i + 2].lambda - r.entries[i].lambda));
            }
            o.require(worst < 1e-8, "periodic lambda_{n+2} = lambda_n");
            o.note(fmt("periodic repeat err %.1e", worst));
        }
        for (double ell : {1.0, 1.7}) {
            for (double shift : {0.0, 0.5}) {
                if (ell == 1.0 && shift == 0.0) continue;
                const Diagnosis other = diagnose(scan(np.potential, ell, -20, 20, shift * ell, so));
                o.require(other.verdict == d.verdict, np.name + " verdict stable at ell " + fmt("%g", ell) +
                                                          fmt(", offset %g", shift * ell));
            }
        }
    }
    o.require(base["x_squared"] == "growing_tails", "q = x^2 shows discreteness evidence");
    o.require(base["minus_x_squared"] == "decreasing_tails", "q = -x^2 shows unboundedness evidence");
    o.require(base["zero"] == "flat", "q = 0 is flat");
    o.require(base["periodic_delta_comb"] == "flat", "periodic comb is flat");
    for (const auto& [name, verdict] : base) o.note(name + ": " + verdict);
    return o;
}

Outcome lower_bound() {
    Outcome o;
    ScanOptions so;
    so.window = {0.005, 1e-12, true};
    const ScanReport r = scan(HermitianPotential::zero(1), 1.0, -5, 5, 0.0, so);
    o.require(r.global_lower_bound <= 0.0, "pi^2 - 8 kappa^2 <= 0");
    o.require(std::abs(r.min_lambda - kPi * kPi) < 1e-6, "min lambda is pi^2");
    o.note(fmt("bound %.6f", r.global_lower_bound) + fmt(", kappa %.10f", r.kappa));
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "analytic eigenvalue", 5.0, analytic_eigenvalue},
        {2, "delta potential cross-validation", 10.0, delta_cross_validation},
        {3, "localization identity battery", 0.0, localization_identity},
        {4, "theta identity and kappa stability", 0.0, theta_identity},
        {5, "exact discrete symmetries", 0.0, discrete_symmetries},
        {6, "monotonicity suite", 0.0, monotonicity},
        {7, "localization diagnostics", 120.0, localization},
        {8, "lower-bound validity", 0.0, lower_bound},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& ex) {
            out.ok = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && secs >= c.budget_s) out.require(false, "runtime budget " + fmt("%g s", c.budget_s));
        failures += out.ok ? 0 : 1;
        std::printf("%s  %d. %s (%.2f s): %s\n", out.ok ? "PASS" : "FAIL", c.id, c.name, secs, out.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
