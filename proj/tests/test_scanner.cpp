#include <doctest.h>

#include <map>

#include "locspec/battery.hpp"
#include "locspec/partition.hpp"
#include "locspec/scanner.hpp"
#include "support.hpp"

using namespace locspec;
using namespace locspec::testing;

namespace {

ScanOptions fast(bool richardson = false, int workers = 2) {
    ScanOptions o;
    o.window = {0.01, 1e-12, richardson};
    o.workers = workers;
    return o;
}

const HermitianPotential& comb() {
    static const HermitianPotential p =
        HermitianPotential::delta_comb(1, {0.0}, {scalar(-5.0)}, Periodicity{1.0, 0.0});
    return p;
}

}  // namespace

TEST_SUITE("scanner") {

TEST_CASE("windows") {
    const Window w{3, 1.0, 0.25};
    CHECK(w.interval() == Interval{1.75, 2.75});
    const Window next{4, 1.0, 0.25};
    CHECK(w.interval().hi - next.interval().lo == doctest::Approx(0.5));
}

TEST_CASE("lambda_window examples") {
    const auto zero = HermitianPotential::zero(1);
    for (long n : {-7L, 0L, 5L}) {
        const WindowValue v = lambda_window(zero, {n, 1.0, 0.0}, {0.005, 1e-12, true});
        CHECK(v.extrapolated);
        CHECK(std::abs(v.lambda - kPi * kPi) < 1e-6);
    }

    const auto p = cubic(1.0);
    for (double c : {-3.0, 8.5}) {
        for (long n : {-2L, 3L}) {
            const double base = lambda_window(p, {n, 1.0, 0.0}, {0.02, 1e-13, false}).lambda;
            const double moved = lambda_window(shifted(p, c), {n, 1.0, 0.0}, {0.02, 1e-13, false}).lambda;
            CHECK(std::abs(moved - (base + c)) <= 1e-12 * (1.0 + std::abs(base + c)) * 10);
        }
    }

    // q = x^2: the window centred at x = n/2 + 1/2, so |n| grows on both sides of n = -1.
    std::map<long, double> lam;
    for (long n = -16; n <= 14; ++n) lam[n] = lambda_window(p, {n, 1.0, 0.0}, {0.02, 1e-10, false}).lambda;
    for (long n = 4; n < 14; ++n) CHECK(lam[n + 1] > lam[n]);
    for (long n = -5; n > -16; --n) CHECK(lam[n - 1] > lam[n]);
}

TEST_CASE("scan: translation invariance of the free problem") {
    const ScanReport r = scan(HermitianPotential::zero(1), 1.0, -10, 10, 0.0, fast());
    REQUIRE(r.entries.size() == 21);
    for (const auto& e : r.entries) CHECK(std::abs(e.lambda - r.entries.front().lambda) < 1e-8);
    for (std::size_t i = 1; i < r.entries.size(); ++i) CHECK(r.entries[i].n == r.entries[i - 1].n + 1);
}

TEST_CASE("scan: periodic potential repeats every two windows") {
    const ScanReport r = scan(comb(), 1.0, -12, 12, 0.0, fast(true));
    for (std::size_t i = 0; i + 2 < r.entries.size(); ++i) {
        CHECK(std::abs(r.entries[i + 2].lambda - r.entries[i].lambda) < 1e-8);
    }
    // Odd windows contain a delta in their interior; even ones only touch the comb at the ends.
    CHECK(std::abs(r.entries[12].lambda - kPi * kPi) < 1e-5);
    CHECK(r.entries[13].lambda < 0.0);
}

TEST_CASE("scan: half-period offset reindexes the windows") {
    for (const auto& np : localization_battery()) {
        const ScanReport a = scan(np.potential, 1.0, -6, 6, 0.0, fast());
        const ScanReport b = scan(np.potential, 1.0, -7, 5, 0.5, fast());
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            INFO(np.name << " n=" << a.entries[i].n);
            CHECK(b.entries[i].n + 1 == a.entries[i].n);
            CHECK(std::abs(a.entries[i].lambda - b.entries[i].lambda) < 1e-8 * (1.0 + std::abs(a.entries[i].lambda)));
        }
    }
}

TEST_CASE("scan is independent of the worker count") {
    const auto p = cubic(-1.0);
    const ScanReport one = scan(p, 1.0, -15, 15, 0.1, fast(true, 1));
    const ScanReport many = scan(p, 1.0, -15, 15, 0.1, fast(true, 7));
    REQUIRE(one.entries.size() == many.entries.size());
    for (std::size_t i = 0; i < one.entries.size(); ++i) {
        CHECK(one.entries[i].n == many.entries[i].n);
        CHECK(one.entries[i].lambda == many.entries[i].lambda);
        CHECK(one.entries[i].residual == many.entries[i].residual);
    }
    CHECK(one.global_lower_bound == many.global_lower_bound);
}

TEST_CASE("scan records failing windows and continues") {
    const auto bounded = HermitianPotential::from_polynomial_pieces(1, {{0.0, 3.0, {scalar(0.0)}, std::nullopt}});
    const ScanReport r = scan(bounded, 1.0, 0, 6, 0.0, fast());
    CHECK(r.partial);
    REQUIRE(r.first_failure().has_value());
    CHECK(*r.first_failure() == 5);
    CHECK(r.entries[0].ok());
    CHECK(r.entries[4].ok());
    CHECK_FALSE(r.entries[6].ok());
    CHECK(std::abs(r.min_lambda - kPi * kPi) < 1e-3);
    const Diagnosis d = diagnose(r);
    CHECK(d.caveats.size() >= 3);
}

TEST_CASE("global lower bound") {
    const double kappa = PartitionFunction(1.0).kappa();
    const ScanReport zero = scan(HermitianPotential::zero(1), 1.0, -4, 4, 0.0, fast(true));
    CHECK(zero.global_lower_bound == zero.min_lambda - 8.0 * zero.kappa * zero.kappa);
    CHECK(global_lower_bound(zero) == zero.global_lower_bound);
    CHECK(zero.kappa == kappa);
    CHECK(std::abs(zero.min_lambda - kPi * kPi) < 1e-6);
    CHECK(zero.global_lower_bound <= 0.0);

    const double c = 2.75;
    const ScanReport moved = scan(shifted(HermitianPotential::zero(1), c), 1.0, -4, 4, 0.0, fast(true));
    CHECK(std::abs(moved.global_lower_bound - (zero.global_lower_bound + c)) < 1e-9);

    const ScanReport periodic = scan(comb(), 1.0, -6, 6, 0.0, fast(true));
    const double window_value = lambda_window(comb(), {1, 1.0, 0.0}, fast(true).window).lambda;
    CHECK(std::abs(periodic.global_lower_bound - (window_value - 8.0 * kappa * kappa)) < 1e-12);
}

TEST_CASE("property: enlarging the range never raises the bound") {
    Rng rng(61);
    const auto p = cubic(-0.5);
    for (int trial = 0; trial < 8; ++trial) {
        const long lo = rng.integer(-10, 0);
        const long hi = rng.integer(0, 10);
        const ScanReport inner = scan(p, 1.0, lo, hi, 0.0, fast());
        const ScanReport outer = scan(p, 1.0, lo - rng.integer(0, 3), hi + rng.integer(0, 3), 0.0, fast());
        CHECK(outer.global_lower_bound <= inner.global_lower_bound);
    }
}

TEST_CASE("diagnose examples") {
    const auto battery = localization_battery();
    std::map<std::string, Diagnosis> d;
    for (const auto& np : battery) d[np.name] = diagnose(scan(np.potential, 1.0, -20, 20, 0.0, fast()));

    CHECK(d["zero"].verdict == "flat");
    CHECK_FALSE(d["zero"].discreteness_evidence);
    CHECK_FALSE(d["zero"].unboundedness_evidence);
    CHECK(d["zero"].bounded_below_on_range);
    CHECK(d["x_squared"].discreteness_evidence);
    CHECK_FALSE(d["x_squared"].unboundedness_evidence);
    CHECK(d["minus_x_squared"].unboundedness_evidence);
    CHECK_FALSE(d["minus_x_squared"].discreteness_evidence);
    CHECK(d["periodic_delta_comb"].verdict == "flat");
    for (const auto& [name, diag] : d) {
        REQUIRE_FALSE(diag.caveats.empty());
        CHECK(diag.caveats.front().find("EVIDENCE") != std::string::npos);
    }
}

TEST_CASE("diagnosis is stable under offset and window length") {
    for (const auto& np : localization_battery()) {
        const std::string base = diagnose(scan(np.potential, 1.0, -20, 20, 0.0, fast())).verdict;
        INFO(np.name);
        CHECK(diagnose(scan(np.potential, 1.0, -20, 20, 0.5, fast())).verdict == base);
        CHECK(diagnose(scan(np.potential, 1.7, -20, 20, 0.0, fast())).verdict == base);
        CHECK(diagnose(scan(np.potential, 1.7, -20, 20, 0.85, fast())).verdict == base);
    }
}

TEST_CASE("half-line mode uses the right tail only") {
    ScanOptions o = fast();
    o.half_line = true;
    const ScanReport r = scan(cubic(1.0), 1.0, -20, 20, 0.0, o);
    CHECK(r.entries.front().n == 0);
    CHECK(r.half_line);
    const Diagnosis d = diagnose(r);
    CHECK(d.discreteness_evidence);
    CHECK(d.tails.size() == 1);
    CHECK(diagnose(scan(HermitianPotential::zero(1), 1.0, 0, 20, 0.0, o)).verdict == "flat");
    CHECK(diagnose(scan(cubic(-1.0), 1.0, 0, 20, 0.0, o)).unboundedness_evidence);

    // Without half-line mode a one-sided range cannot show two growing tails.
    CHECK_FALSE(diagnose(scan(cubic(1.0), 1.0, 0, 20, 0.0, fast())).discreteness_evidence);
}

}  // TEST_SUITE
