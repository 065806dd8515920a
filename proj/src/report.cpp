#include "locspec/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "locspec/errors.hpp"

namespace locspec {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path);
    }
}

std::string scan_csv(const ScanReport& report) {
    std::ostringstream out;
    out << "n,a_left,b_right,lambda,residual,mesh_h,extrapolated\n";
    for (const auto& e : report.entries) {
        out << e.n << ',' << format_double(e.a_left) << ',' << format_double(e.b_right) << ','
            << format_double(e.lambda) << ',' << format_double(e.residual) << ',' << format_double(e.mesh_h) << ','
            << (e.extrapolated ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string scan_gnuplot(const ScanReport& report) {
    std::ostringstream out;
    out << "# n lambda\n";
    for (const auto& e : report.entries) {
        if (e.ok()) out << e.n << ' ' << format_double(e.lambda) << '\n';
    }
    return out.str();
}

std::string scan_json(const ScanReport& report, const Diagnosis& d) {
    using nlohmann::json;
    json entries = json::array();
    json failures = json::array();
    for (const auto& e : report.entries) {
        json row{{"n", e.n},
                 {"a_left", e.a_left},
                 {"b_right", e.b_right},
                 {"lambda", e.ok() ? json(e.lambda) : json(nullptr)},
                 {"residual", e.residual},
                 {"mesh_h", e.mesh_h},
                 {"extrapolated", e.extrapolated}};
        if (!e.ok()) {
            row["error"] = *e.error;
            failures.push_back({{"n", e.n}, {"error", *e.error}});
        }
        entries.push_back(std::move(row));
    }
    json tails = json::array();
    for (const auto& t : d.tails) {
        tails.push_back({{"side", t.side},
                         {"n", t.n},
                         {"nondecreasing_outward", t.nondecreasing_outward},
                         {"decreasing_without_floor", t.decreasing_without_floor}});
    }
    json diagnosis{{"bounded_below_on_range", d.bounded_below_on_range},
                   {"min_lambda", d.min_lambda},
                   {"lower_bound", d.lower_bound},
                   {"discreteness_evidence", d.discreteness_evidence},
                   {"unboundedness_evidence", d.unboundedness_evidence},
                   {"verdict", d.verdict},
                   {"tails", tails},
                   {"caveats", d.caveats}};
    json doc{{"ell", report.ell},
             {"offset", report.offset},
             {"n_min", report.n_min},
             {"n_max", report.n_max},
             {"half_line", report.half_line},
             {"kappa", report.kappa},
             {"min_lambda", report.min_lambda},
             {"global_lower_bound", report.global_lower_bound},
             {"partial", report.partial},
             {"failures", failures},
             {"windows", entries},
             {"diagnosis", diagnosis}};
    return doc.dump(2) + "\n";
}

}  // namespace locspec
