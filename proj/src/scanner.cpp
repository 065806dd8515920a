#include "locspec/scanner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "locspec/errors.hpp"
#include "locspec/form.hpp"
#include "locspec/partition.hpp"

namespace locspec {

Interval Window::interval() const {
    const double lo = offset + static_cast<double>(n) * ell / 2.0;
    return {lo, lo + ell};
}

WindowValue lambda_window(const HermitianPotential& potential, const Window& w, const WindowOptions& opts) {
    if (!(w.ell > 0.0) || !std::isfinite(w.ell)) throw DomainError("window length must be positive");
    const Mesh coarse = build_mesh(potential, w.interval(), opts.target_h);
    WindowValue out;
    out.mesh_h = coarse.max_element();
    EigenResult raw = smallest_eigenpair(assemble(potential, coarse), opts.tol);
    out.lambda_coarse = raw.lambda;
    if (!opts.richardson) {
        out.lambda = raw.lambda;
        out.eigen = std::move(raw);
        return out;
    }
    EigenResult fine = smallest_eigenpair(assemble(potential, refine(coarse)), opts.tol);
    out.lambda = richardson(raw.lambda, fine.lambda);
    out.extrapolated = true;
    out.eigen = std::move(fine);
    return out;
}

std::optional<long> ScanReport::first_failure() const {
    for (const auto& e : entries) {
        if (!e.ok()) return e.n;
    }
    return std::nullopt;
}

double global_lower_bound(const ScanReport& report) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : report.entries) {
        if (e.ok()) best = std::min(best, e.lambda);
    }
    return best - 8.0 * report.kappa * report.kappa;
}

ScanReport scan(const HermitianPotential& potential, double ell, long n_min, long n_max, double offset,
                const ScanOptions& opts) {
    if (!(ell > 0.0) || !std::isfinite(ell)) throw DomainError("ell must be positive and finite");
    if (!std::isfinite(offset)) throw DomainError("offset must be finite");
    if (opts.half_line) n_min = std::max(n_min, 0L);
    if (n_min > n_max) throw DomainError("empty window range");

    ScanReport report;
    report.ell = ell;
    report.offset = offset;
    report.n_min = n_min;
    report.n_max = n_max;
    report.half_line = opts.half_line;
    report.kappa = PartitionFunction(ell).kappa();

    const auto count = static_cast<std::size_t>(n_max - n_min + 1);
    report.entries.resize(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            ScanEntry& e = report.entries[i];
            const Window w{n_min + static_cast<long>(i), ell, offset};
            const Interval iv = w.interval();
            e.n = w.n;
            e.a_left = iv.lo;
            e.b_right = iv.hi;
            try {
                const WindowValue v = lambda_window(potential, w, opts.window);
                e.lambda = v.lambda;
                e.residual = v.eigen.residual;
                e.mesh_h = v.mesh_h;
                e.extrapolated = v.extrapolated;
            } catch (const std::exception& ex) {
                e.error = ex.what();
                e.lambda = std::numeric_limits<double>::quiet_NaN();
            }
        }
    };

    int workers = opts.workers > 0 ? opts.workers : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, static_cast<int>(std::min<std::size_t>(count, 256)));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    report.partial = report.first_failure().has_value();
    report.min_lambda = std::numeric_limits<double>::infinity();
    for (const auto& e : report.entries) {
        if (e.ok()) report.min_lambda = std::min(report.min_lambda, e.lambda);
    }
    report.global_lower_bound = report.min_lambda - 8.0 * report.kappa * report.kappa;
    return report;
}

namespace {

double scale(double v) { return std::max(1.0, std::abs(v)); }

// values ordered outward (increasing |n|).
TailTrend classify(std::string side, const std::vector<const ScanEntry*>& tail, double tol) {
    TailTrend t;
    t.side = std::move(side);
    for (const auto* e : tail) t.n.push_back(e->n);
    if (tail.size() < 2) return t;

    bool nondecreasing = true;
    bool nonincreasing = true;
    for (std::size_t i = 0; i + 1 < tail.size(); ++i) {
        const double a = tail[i]->lambda;
        const double b = tail[i + 1]->lambda;
        const double slack = tol * scale(a);
        if (b < a - slack) nondecreasing = false;
        if (b > a + slack) nonincreasing = false;
    }
    const double first = tail.front()->lambda;
    const double last = tail.back()->lambda;
    const double net = last - first;
    const double slack = tol * scale(first);
    t.nondecreasing_outward = nondecreasing && net > slack;

    if (nonincreasing && net < -slack) {
        // No floor: the outermost decrement is still at least half the average one.
        const double average = -net / static_cast<double>(tail.size() - 1);
        const double final_drop = tail[tail.size() - 2]->lambda - last;
        t.decreasing_without_floor = final_drop >= 0.5 * average;
    }
    return t;
}

}  // namespace

Diagnosis diagnose(const ScanReport& report, const DiagnoseParams& params) {
    Diagnosis d;
    d.min_lambda = report.min_lambda;
    d.lower_bound = report.global_lower_bound;
    d.bounded_below_on_range = std::isfinite(report.min_lambda);

    std::vector<const ScanEntry*> left;
    std::vector<const ScanEntry*> right;
    for (const auto& e : report.entries) {
        if (!e.ok()) continue;
        (e.n < 0 ? left : right).push_back(&e);
    }
    // Outward order: increasing |n|.
    std::reverse(left.begin(), left.end());

    auto tail_of = [&](const std::vector<const ScanEntry*>& side) {
        const auto k = static_cast<std::size_t>(std::ceil(params.tail_fraction * static_cast<double>(side.size())));
        const std::size_t take = std::min(side.size(), std::max<std::size_t>(k, 2));
        return std::vector<const ScanEntry*>(side.end() - static_cast<std::ptrdiff_t>(take), side.end());
    };

    std::vector<TailTrend> considered;
    if (!report.half_line && left.size() >= 2) considered.push_back(classify("left", tail_of(left), params.trend_tol));
    if (right.size() >= 2) considered.push_back(classify("right", tail_of(right), params.trend_tol));

    const std::size_t needed = report.half_line ? 1 : 2;
    d.discreteness_evidence =
        considered.size() >= needed &&
        std::all_of(considered.begin(), considered.end(), [](const TailTrend& t) { return t.nondecreasing_outward; });
    d.unboundedness_evidence =
        std::any_of(considered.begin(), considered.end(), [](const TailTrend& t) { return t.decreasing_without_floor; });
    d.tails = considered;

    if (d.unboundedness_evidence) {
        d.verdict = "decreasing_tails";
    } else if (d.discreteness_evidence) {
        d.verdict = "growing_tails";
    } else {
        d.verdict = "flat";
    }

    std::ostringstream range;
    range << "windows n = " << report.n_min << " .. " << report.n_max << " only";
    d.caveats.push_back("EVIDENCE, not proof: verdicts describe the scanned " + range.str() +
                        "; semiboundedness and discreteness concern all n.");
    d.caveats.push_back(
        "lower_bound holds for the form on test functions supported in the union of the scanned windows.");
    if (std::any_of(report.entries.begin(), report.entries.end(), [](const ScanEntry& e) { return e.extrapolated; })) {
        d.caveats.push_back("Richardson values are not guaranteed upper bounds of the window eigenvalues.");
    }
    if (considered.size() < needed) {
        d.caveats.push_back("too few windows on one side of n = 0 to judge a tail trend.");
    }
    if (report.partial) {
        d.caveats.push_back("some windows failed; their values are excluded from every verdict.");
    }
    return d;
}

}  // namespace locspec
