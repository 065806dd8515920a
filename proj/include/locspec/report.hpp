#pragma once

#include <string>

#include "locspec/scanner.hpp"

namespace locspec {

/// "%.17g"; NaN prints as "nan".
std::string format_double(double v);

/// Writes to a temporary sibling and renames it over `path`. Throws Error on I/O failure.
void write_atomic(const std::string& path, const std::string& content);

/// Header n,a_left,b_right,lambda,residual,mesh_h,extrapolated; one row per window.
std::string scan_csv(const ScanReport& report);

/// Two columns "n lambda" for plotting; failed windows are skipped.
std::string scan_gnuplot(const ScanReport& report);

/// Full report with the diagnosis block, pretty-printed JSON.
std::string scan_json(const ScanReport& report, const Diagnosis& diagnosis);

}  // namespace locspec
