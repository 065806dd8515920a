#pragma once

#include <optional>
#include <string>
#include <vector>

#include "locspec/errors.hpp"
#include "locspec/potential.hpp"

namespace locspec {

/// Schema violation in a job description; `line` is 1-based when known.
class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& message, std::optional<int> line, std::string source = {});
    std::optional<int> line() const { return line_; }
    const std::string& message() const { return message_; }

private:
    std::string message_;
    std::optional<int> line_;
};

/// A matrix entry of the configuration: either a scalar (meaning s I) or an explicit m x m
/// nested list, stored row-major.
struct MatrixValue {
    bool scalar = true;
    std::vector<Complex> entries;

    static MatrixValue of(double s) { return {true, {Complex(s, 0.0)}}; }
    Matrix to_matrix(int m) const;
    bool operator==(const MatrixValue&) const = default;
};

struct PieceConfig {
    double lo = 0.0;
    double hi = 0.0;
    std::optional<double> origin;
    std::vector<MatrixValue> coeffs;
    bool operator==(const PieceConfig&) const = default;
};

struct JumpConfig {
    double x = 0.0;
    MatrixValue dq;
    bool operator==(const JumpConfig&) const = default;
};

struct PotentialConfig {
    std::string kind = "zero";  // zero | polynomial_pieces | delta_comb | samples
    int dimension = 1;
    std::optional<double> period;
    double cell_start = 0.0;
    std::vector<PieceConfig> pieces;        // polynomial_pieces
    std::vector<JumpConfig> jumps;          // polynomial_pieces
    std::vector<double> locations;          // delta_comb
    std::vector<MatrixValue> strengths;     // delta_comb
    std::vector<double> x;                  // samples
    std::vector<MatrixValue> q;             // samples
    bool operator==(const PotentialConfig&) const = default;
};

struct NumericOptions {
    double ell = 1.0;
    long n = 0;  // eig window
    long n_min = -10;
    long n_max = 10;
    double offset = 0.0;
    double target_h = 0.01;
    double tol = 1e-10;
    bool richardson = false;
    bool half_line = false;
    std::string method = "fem";  // fem | shooting
    int workers = 1;
    int samples = 1001;  // partition grid
    double tail_fraction = 0.3;
    double trend_tol = 1e-6;
    bool operator==(const NumericOptions&) const = default;
};

struct OutputPaths {
    std::string json;
    std::string csv;
    std::string gnuplot;
    bool operator==(const OutputPaths&) const = default;
};

struct JobConfig {
    std::string task = "eig";  // eig | scan | bound | check-identity | partition
    std::optional<PotentialConfig> potential;  // absent: zero (or the default battery for check-identity)
    NumericOptions options;
    OutputPaths outputs;
    bool operator==(const JobConfig&) const = default;
};

/// Parsed job plus the 1-based source line of every key that was present, keyed by dotted path
/// ("options.ell", "potential.pieces").
struct ParsedJob {
    JobConfig job;
    std::vector<std::pair<std::string, int>> lines;

    std::optional<int> line_of(const std::string& key) const;
};

/// Parses YAML (JSON is accepted as a subset). Unknown keys and wrong types are errors.
ParsedJob parse_job(const std::string& text, const std::string& source = "<config>");
ParsedJob load_job(const std::string& path);

/// Range and consistency checks; throws ConfigError anchored at the offending key.
void validate_job(const ParsedJob& parsed, const std::string& source = "<config>");

/// Canonical YAML for the job, doubles at 17 significant digits.
std::string dump_job(const JobConfig& job);

HermitianPotential build_potential(const PotentialConfig& cfg);

}  // namespace locspec
