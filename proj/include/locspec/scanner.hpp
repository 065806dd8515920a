#pragma once

#include <optional>
#include <string>
#include <vector>

#include "locspec/eigensolver.hpp"
#include "locspec/potential.hpp"

namespace locspec {

/// Window (a + n ell / 2, a + n ell / 2 + ell). Neighbours overlap by ell / 2.
struct Window {
    long n = 0;
    double ell = 1.0;
    double offset = 0.0;

    Interval interval() const;
};

struct WindowOptions {
    double target_h = 0.01;
    double tol = kDefaultEigenTol;
    bool richardson = false;
};

struct WindowValue {
    EigenResult eigen;      // on the finest mesh that was solved
    double lambda = 0.0;    // Richardson value when extrapolated, else eigen.lambda
    double lambda_coarse = 0.0;
    double mesh_h = 0.0;    // largest element of the coarse mesh
    bool extrapolated = false;
};

/// Smallest Dirichlet eigenvalue of the form on the window.
WindowValue lambda_window(const HermitianPotential& potential, const Window& w, const WindowOptions& opts = {});

struct ScanEntry {
    long n = 0;
    double a_left = 0.0;
    double b_right = 0.0;
    double lambda = 0.0;
    double residual = 0.0;
    double mesh_h = 0.0;
    bool extrapolated = false;
    std::optional<std::string> error;

    bool ok() const { return !error.has_value(); }
};

struct ScanReport {
    double ell = 1.0;
    double offset = 0.0;
    long n_min = 0;
    long n_max = 0;
    bool half_line = false;
    double kappa = 0.0;
    std::vector<ScanEntry> entries;  // sorted by n
    double min_lambda = 0.0;
    double global_lower_bound = 0.0;  // min_lambda - 8 kappa^2
    bool partial = false;              // some window failed

    std::optional<long> first_failure() const;
};

struct ScanOptions {
    WindowOptions window;
    bool half_line = false;
    int workers = 1;  // 0 selects the hardware concurrency
};

/// Evaluates every window n in [n_min, n_max] (n >= max(n_min, 0) in half-line mode). Window
/// failures are recorded per entry and the scan continues.
ScanReport scan(const HermitianPotential& potential, double ell, long n_min, long n_max, double offset = 0.0,
                const ScanOptions& opts = {});

/// min over successful entries of lambda_n, minus 8 kappa^2.
double global_lower_bound(const ScanReport& report);

struct DiagnoseParams {
    double tail_fraction = 0.3;
    double trend_tol = 1e-6;  // relative to max(1, |lambda|)
};

struct TailTrend {
    std::string side;  // "left" or "right"
    std::vector<long> n;
    bool nondecreasing_outward = false;
    bool decreasing_without_floor = false;
};

/// Finite-range evidence only: the criteria concern all n, a scan sees a few.
struct Diagnosis {
    bool bounded_below_on_range = false;
    double min_lambda = 0.0;
    double lower_bound = 0.0;
    bool discreteness_evidence = false;
    bool unboundedness_evidence = false;
    std::string verdict;  // "growing_tails", "decreasing_tails" or "flat"
    std::vector<TailTrend> tails;
    std::vector<std::string> caveats;
};

Diagnosis diagnose(const ScanReport& report, const DiagnoseParams& params = {});

}  // namespace locspec
