#include "locspec/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace locspec {

namespace {

std::string format_error(const std::string& message, std::optional<int> line, const std::string& source) {
    std::ostringstream out;
    out << (source.empty() ? "<config>" : source);
    if (line) out << ":" << *line;
    out << ": " << message;
    return out.str();
}

class Reader {
public:
    Reader(std::string source, ParsedJob& out) : source_(std::move(source)), out_(out) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
        std::optional<int> line;
        if (node.IsDefined() && node.Mark().line >= 0) line = node.Mark().line + 1;
        throw ConfigError(message, line, source_);
    }

    // Iterates a mapping, recording lines and rejecting keys outside `allowed`.
    template <typename F>
    void each_key(const YAML::Node& map, const std::string& path, const std::set<std::string>& allowed, F&& f) {
        if (!map.IsMap()) fail(map, (path.empty() ? std::string("document") : path) + " must be a mapping");
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            const std::string full = path.empty() ? key : path + "." + key;
            if (!allowed.count(key)) fail(kv.first, "unknown key '" + full + "'");
            out_.lines.emplace_back(full, kv.first.Mark().line + 1);
            f(key, full, kv.second);
        }
    }

    double real(const YAML::Node& n, const std::string& path, bool allow_inf = false) const {
        if (!n.IsScalar()) fail(n, path + " must be a number");
        double v = 0.0;
        try {
            v = n.as<double>();
        } catch (const YAML::Exception&) {
            fail(n, path + " must be a number");
        }
        if (std::isnan(v) || (!allow_inf && std::isinf(v))) fail(n, path + " must be finite");
        return v;
    }

    long integer(const YAML::Node& n, const std::string& path) const {
        if (!n.IsScalar()) fail(n, path + " must be an integer");
        try {
            return n.as<long>();
        } catch (const YAML::Exception&) {
            fail(n, path + " must be an integer");
        }
    }

    bool boolean(const YAML::Node& n, const std::string& path) const {
        if (!n.IsScalar()) fail(n, path + " must be true or false");
        try {
            return n.as<bool>();
        } catch (const YAML::Exception&) {
            fail(n, path + " must be true or false");
        }
    }

    std::string text(const YAML::Node& n, const std::string& path) const {
        if (!n.IsScalar()) fail(n, path + " must be a string");
        return n.as<std::string>();
    }

    std::vector<double> reals(const YAML::Node& n, const std::string& path) const {
        if (!n.IsSequence()) fail(n, path + " must be a list of numbers");
        std::vector<double> v;
        for (std::size_t i = 0; i < n.size(); ++i) v.push_back(real(n[i], path + "[" + std::to_string(i) + "]"));
        return v;
    }

    Complex entry(const YAML::Node& n, const std::string& path) const {
        if (n.IsSequence()) {
            if (n.size() != 2) fail(n, path + " complex entries are written [re, im]");
            return {real(n[0], path), real(n[1], path)};
        }
        return {real(n, path), 0.0};
    }

    MatrixValue matrix(const YAML::Node& n, const std::string& path) const {
        if (n.IsScalar()) return MatrixValue::of(real(n, path));
        if (!n.IsSequence() || n.size() == 0) fail(n, path + " must be a number or a list of matrix rows");
        MatrixValue mv;
        mv.scalar = false;
        const std::size_t rows = n.size();
        for (std::size_t r = 0; r < rows; ++r) {
            const YAML::Node row = n[r];
            if (!row.IsSequence() || row.size() != rows) fail(row, path + " must be a square matrix");
            for (std::size_t c = 0; c < rows; ++c) mv.entries.push_back(entry(row[c], path));
        }
        return mv;
    }

    std::vector<MatrixValue> matrices(const YAML::Node& n, const std::string& path) const {
        if (!n.IsSequence()) fail(n, path + " must be a list");
        std::vector<MatrixValue> v;
        for (std::size_t i = 0; i < n.size(); ++i) v.push_back(matrix(n[i], path + "[" + std::to_string(i) + "]"));
        return v;
    }

    PotentialConfig potential(const YAML::Node& node) {
        PotentialConfig p;
        each_key(node, "potential",
                 {"kind", "dimension", "period", "cell_start", "pieces", "jumps", "locations", "strengths", "x", "q"},
                 [&](const std::string& key, const std::string& path, const YAML::Node& v) {
                     if (key == "kind") p.kind = text(v, path);
                     else if (key == "dimension") p.dimension = static_cast<int>(integer(v, path));
                     else if (key == "period") p.period = real(v, path);
                     else if (key == "cell_start") p.cell_start = real(v, path);
                     else if (key == "locations") p.locations = reals(v, path);
                     else if (key == "strengths") p.strengths = matrices(v, path);
                     else if (key == "x") p.x = reals(v, path);
                     else if (key == "q") p.q = matrices(v, path);
                     else if (key == "pieces") p.pieces = pieces(v, path);
                     else if (key == "jumps") p.jumps = jumps(v, path);
                 });
        return p;
    }

    std::vector<PieceConfig> pieces(const YAML::Node& n, const std::string& path) {
        if (!n.IsSequence()) fail(n, path + " must be a list");
        std::vector<PieceConfig> out;
        for (std::size_t i = 0; i < n.size(); ++i) {
            const std::string item = path + "[" + std::to_string(i) + "]";
            PieceConfig pc;
            bool has_lo = false, has_hi = false, has_coeffs = false;
            each_key(n[i], item, {"lo", "hi", "origin", "coeffs"},
                     [&](const std::string& key, const std::string& p, const YAML::Node& v) {
                         if (key == "lo") pc.lo = real(v, p, true), has_lo = true;
                         else if (key == "hi") pc.hi = real(v, p, true), has_hi = true;
                         else if (key == "origin") pc.origin = real(v, p);
                         else if (key == "coeffs") pc.coeffs = matrices(v, p), has_coeffs = true;
                     });
            if (!has_lo || !has_hi || !has_coeffs) fail(n[i], item + " needs lo, hi and coeffs");
            out.push_back(std::move(pc));
        }
        return out;
    }

    std::vector<JumpConfig> jumps(const YAML::Node& n, const std::string& path) {
        if (!n.IsSequence()) fail(n, path + " must be a list");
        std::vector<JumpConfig> out;
        for (std::size_t i = 0; i < n.size(); ++i) {
            const std::string item = path + "[" + std::to_string(i) + "]";
            JumpConfig jc;
            bool has_x = false, has_dq = false;
            each_key(n[i], item, {"x", "dq"}, [&](const std::string& key, const std::string& p, const YAML::Node& v) {
                if (key == "x") jc.x = real(v, p), has_x = true;
                else jc.dq = matrix(v, p), has_dq = true;
            });
            if (!has_x || !has_dq) fail(n[i], item + " needs x and dq");
            out.push_back(std::move(jc));
        }
        return out;
    }

    NumericOptions options(const YAML::Node& node) {
        NumericOptions o;
        each_key(node, "options",
                 {"ell", "n", "n_min", "n_max", "offset", "target_h", "tol", "richardson", "half_line", "method",
                  "workers", "samples", "tail_fraction", "trend_tol"},
                 [&](const std::string& key, const std::string& path, const YAML::Node& v) {
                     if (key == "ell") o.ell = real(v, path);
                     else if (key == "n") o.n = integer(v, path);
                     else if (key == "n_min") o.n_min = integer(v, path);
                     else if (key == "n_max") o.n_max = integer(v, path);
                     else if (key == "offset") o.offset = real(v, path);
                     else if (key == "target_h") o.target_h = real(v, path);
                     else if (key == "tol") o.tol = real(v, path);
                     else if (key == "richardson") o.richardson = boolean(v, path);
                     else if (key == "half_line") o.half_line = boolean(v, path);
                     else if (key == "method") o.method = text(v, path);
                     else if (key == "workers") o.workers = static_cast<int>(integer(v, path));
                     else if (key == "samples") o.samples = static_cast<int>(integer(v, path));
                     else if (key == "tail_fraction") o.tail_fraction = real(v, path);
                     else if (key == "trend_tol") o.trend_tol = real(v, path);
                 });
        return o;
    }

    OutputPaths outputs(const YAML::Node& node) {
        OutputPaths o;
        each_key(node, "outputs", {"json", "csv", "gnuplot"},
                 [&](const std::string& key, const std::string& path, const YAML::Node& v) {
                     if (key == "json") o.json = text(v, path);
                     else if (key == "csv") o.csv = text(v, path);
                     else o.gnuplot = text(v, path);
                 });
        return o;
    }

    void document(const YAML::Node& root) {
        if (root.IsNull()) return;
        each_key(root, "", {"task", "potential", "options", "outputs"},
                 [&](const std::string& key, const std::string& path, const YAML::Node& v) {
                     if (key == "task") out_.job.task = text(v, path);
                     else if (key == "potential") out_.job.potential = potential(v);
                     else if (key == "options") out_.job.options = options(v);
                     else out_.job.outputs = outputs(v);
                 });
    }

private:
    std::string source_;
    ParsedJob& out_;
};

void emit_matrix(YAML::Emitter& e, const MatrixValue& mv) {
    if (mv.scalar) {
        e << mv.entries.at(0).real();
        return;
    }
    const auto m = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(mv.entries.size()))));
    e << YAML::Flow << YAML::BeginSeq;
    for (std::size_t r = 0; r < m; ++r) {
        e << YAML::Flow << YAML::BeginSeq;
        for (std::size_t c = 0; c < m; ++c) {
            const Complex z = mv.entries[r * m + c];
            if (z.imag() == 0.0) {
                e << z.real();
            } else {
                e << YAML::Flow << YAML::BeginSeq << z.real() << z.imag() << YAML::EndSeq;
            }
        }
        e << YAML::EndSeq;
    }
    e << YAML::EndSeq;
}

void emit_reals(YAML::Emitter& e, const std::vector<double>& v) {
    e << YAML::Flow << YAML::BeginSeq;
    for (double x : v) e << x;
    e << YAML::EndSeq;
}

void emit_matrices(YAML::Emitter& e, const std::vector<MatrixValue>& v) {
    e << YAML::BeginSeq;
    for (const auto& mv : v) emit_matrix(e, mv);
    e << YAML::EndSeq;
}

[[noreturn]] void fail_at(const ParsedJob& p, const std::string& source, const std::string& key,
                          const std::string& message) {
    throw ConfigError(key + ": " + message, p.line_of(key), source);
}

bool matrix_finite(const MatrixValue& mv) {
    for (const auto& z : mv.entries) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return !mv.entries.empty();
}

}  // namespace

ConfigError::ConfigError(const std::string& message, std::optional<int> line, std::string source)
    : ValidationError(format_error(message, line, source)), message_(message), line_(line) {}

Matrix MatrixValue::to_matrix(int m) const {
    if (scalar) return entries.at(0) * Matrix::Identity(m, m);
    if (entries.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(m)) {
        throw ValidationError("matrix entry has the wrong size for dimension " + std::to_string(m));
    }
    Matrix out(m, m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) out(r, c) = entries[static_cast<std::size_t>(r * m + c)];
    }
    return out;
}

std::optional<int> ParsedJob::line_of(const std::string& key) const {
    std::string k = key;
    while (true) {
        for (const auto& [name, line] : lines) {
            if (name == k) return line;
        }
        const auto dot = k.rfind('.');
        if (dot == std::string::npos) return std::nullopt;
        k.resize(dot);
    }
}

ParsedJob parse_job(const std::string& text, const std::string& source) {
    ParsedJob parsed;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& ex) {
        throw ConfigError(ex.msg, ex.mark.line >= 0 ? std::optional<int>(ex.mark.line + 1) : std::nullopt, source);
    }
    Reader(source, parsed).document(root);
    return parsed;
}

ParsedJob load_job(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file", std::nullopt, path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_job(buffer.str(), path);
}

void validate_job(const ParsedJob& parsed, const std::string& source) {
    const JobConfig& job = parsed.job;
    const NumericOptions& o = job.options;
    static const std::set<std::string> tasks{"eig", "scan", "bound", "check-identity", "partition"};
    if (!tasks.count(job.task)) fail_at(parsed, source, "task", "unknown task '" + job.task + "'");
    if (!(o.ell > 0.0) || !std::isfinite(o.ell)) fail_at(parsed, source, "options.ell", "must be positive");
    if (!std::isfinite(o.offset)) fail_at(parsed, source, "options.offset", "must be finite");
    if (!(o.target_h > 0.0) || !std::isfinite(o.target_h)) {
        fail_at(parsed, source, "options.target_h", "must be positive");
    }
    if (o.target_h > 0.5 * o.ell) fail_at(parsed, source, "options.target_h", "must not exceed ell / 2");
    if (!(o.tol > 0.0) || !(o.tol < 1.0)) fail_at(parsed, source, "options.tol", "must lie in (0, 1)");
    if (o.n_min > o.n_max) fail_at(parsed, source, "options.n_min", "must not exceed n_max");
    if (o.n_max - o.n_min > 100000) fail_at(parsed, source, "options.n_max", "window range is too large");
    if (o.half_line && o.n_max < 0) fail_at(parsed, source, "options.half_line", "needs n_max >= 0");
    if (o.method != "fem" && o.method != "shooting") {
        fail_at(parsed, source, "options.method", "must be 'fem' or 'shooting'");
    }
    if (o.workers < 0) fail_at(parsed, source, "options.workers", "must be >= 0");
    if (o.samples < 2) fail_at(parsed, source, "options.samples", "must be >= 2");
    if (!(o.tail_fraction > 0.0) || o.tail_fraction > 1.0) {
        fail_at(parsed, source, "options.tail_fraction", "must lie in (0, 1]");
    }
    if (!(o.trend_tol >= 0.0) || !std::isfinite(o.trend_tol)) {
        fail_at(parsed, source, "options.trend_tol", "must be finite and >= 0");
    }

    if (!job.potential) return;
    const PotentialConfig& p = *job.potential;
    static const std::set<std::string> kinds{"zero", "polynomial_pieces", "delta_comb", "samples"};
    if (!kinds.count(p.kind)) fail_at(parsed, source, "potential.kind", "unknown kind '" + p.kind + "'");
    if (p.dimension < 1 || p.dimension > 64) fail_at(parsed, source, "potential.dimension", "must lie in [1, 64]");
    if (p.period && !(*p.period > 0.0)) fail_at(parsed, source, "potential.period", "must be positive");
    if (!std::isfinite(p.cell_start)) fail_at(parsed, source, "potential.cell_start", "must be finite");

    const bool pieces_kind = p.kind == "polynomial_pieces";
    const bool comb_kind = p.kind == "delta_comb";
    const bool samples_kind = p.kind == "samples";
    if (!pieces_kind && (!p.pieces.empty() || !p.jumps.empty())) {
        fail_at(parsed, source, "potential.pieces", "pieces/jumps only apply to kind polynomial_pieces");
    }
    if (!comb_kind && (!p.locations.empty() || !p.strengths.empty())) {
        fail_at(parsed, source, "potential.locations", "locations/strengths only apply to kind delta_comb");
    }
    if (!samples_kind && (!p.x.empty() || !p.q.empty())) {
        fail_at(parsed, source, "potential.x", "x/q only apply to kind samples");
    }
    if (samples_kind && p.period) fail_at(parsed, source, "potential.period", "samples cannot be periodic");
    if (pieces_kind && p.pieces.empty()) fail_at(parsed, source, "potential.pieces", "at least one piece required");
    if (comb_kind && (p.locations.empty() || p.locations.size() != p.strengths.size())) {
        fail_at(parsed, source, "potential.strengths", "needs one strength per location");
    }
    if (samples_kind && (p.x.size() < 2 || p.x.size() != p.q.size())) {
        fail_at(parsed, source, "potential.q", "needs at least two samples and one q per x");
    }
    for (const auto& piece : p.pieces) {
        if (piece.coeffs.empty() || piece.coeffs.size() > static_cast<std::size_t>(kMaxPieceDegree) + 1) {
            fail_at(parsed, source, "potential.pieces", "each piece needs 1 to 9 coefficients");
        }
        for (const auto& c : piece.coeffs) {
            if (!matrix_finite(c)) fail_at(parsed, source, "potential.pieces", "coefficients must be finite");
        }
    }

    try {
        (void)build_potential(p);
    } catch (const Error& ex) {
        fail_at(parsed, source, "potential", ex.what());
    }
}

HermitianPotential build_potential(const PotentialConfig& cfg) {
    const int m = cfg.dimension;
    std::optional<Periodicity> periodic;
    if (cfg.period) periodic = Periodicity{*cfg.period, cfg.cell_start};
    if (cfg.kind == "zero") {
        if (!periodic) return HermitianPotential::zero(m);
        return HermitianPotential::from_polynomial_pieces(
            m, {{cfg.cell_start, cfg.cell_start + *cfg.period, {Matrix::Zero(m, m)}, std::nullopt}}, {}, periodic);
    }
    if (cfg.kind == "polynomial_pieces") {
        std::vector<HermitianPotential::PieceSpec> pieces;
        for (const auto& pc : cfg.pieces) {
            HermitianPotential::PieceSpec spec{pc.lo, pc.hi, {}, pc.origin};
            for (const auto& c : pc.coeffs) spec.coeffs.push_back(c.to_matrix(m));
            pieces.push_back(std::move(spec));
        }
        std::vector<PotentialJump> jumps;
        for (const auto& j : cfg.jumps) jumps.push_back({j.x, j.dq.to_matrix(m)});
        return HermitianPotential::from_polynomial_pieces(m, pieces, std::move(jumps), periodic);
    }
    if (cfg.kind == "delta_comb") {
        std::vector<Matrix> strengths;
        for (const auto& s : cfg.strengths) strengths.push_back(s.to_matrix(m));
        return HermitianPotential::delta_comb(m, cfg.locations, strengths, periodic);
    }
    if (cfg.kind == "samples") {
        std::vector<Matrix> q;
        for (const auto& s : cfg.q) q.push_back(s.to_matrix(m));
        return HermitianPotential::antiderivative_of_samples(cfg.x, q);
    }
    throw ValidationError("unknown potential kind '" + cfg.kind + "'");
}

std::string dump_job(const JobConfig& job) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "task" << YAML::Value << job.task;
    if (job.potential) {
        const PotentialConfig& p = *job.potential;
        e << YAML::Key << "potential" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "kind" << YAML::Value << p.kind;
        e << YAML::Key << "dimension" << YAML::Value << p.dimension;
        if (p.period) e << YAML::Key << "period" << YAML::Value << *p.period;
        e << YAML::Key << "cell_start" << YAML::Value << p.cell_start;
        if (!p.pieces.empty()) {
            e << YAML::Key << "pieces" << YAML::Value << YAML::BeginSeq;
            for (const auto& pc : p.pieces) {
                e << YAML::BeginMap;
                e << YAML::Key << "lo" << YAML::Value << pc.lo;
                e << YAML::Key << "hi" << YAML::Value << pc.hi;
                if (pc.origin) e << YAML::Key << "origin" << YAML::Value << *pc.origin;
                e << YAML::Key << "coeffs" << YAML::Value;
                emit_matrices(e, pc.coeffs);
                e << YAML::EndMap;
            }
            e << YAML::EndSeq;
        }
        if (!p.jumps.empty()) {
            e << YAML::Key << "jumps" << YAML::Value << YAML::BeginSeq;
            for (const auto& j : p.jumps) {
                e << YAML::BeginMap << YAML::Key << "x" << YAML::Value << j.x;
                e << YAML::Key << "dq" << YAML::Value;
                emit_matrix(e, j.dq);
                e << YAML::EndMap;
            }
            e << YAML::EndSeq;
        }
        if (!p.locations.empty()) {
            e << YAML::Key << "locations" << YAML::Value;
            emit_reals(e, p.locations);
        }
        if (!p.strengths.empty()) {
            e << YAML::Key << "strengths" << YAML::Value;
            emit_matrices(e, p.strengths);
        }
        if (!p.x.empty()) {
            e << YAML::Key << "x" << YAML::Value;
            emit_reals(e, p.x);
        }
        if (!p.q.empty()) {
            e << YAML::Key << "q" << YAML::Value;
            emit_matrices(e, p.q);
        }
        e << YAML::EndMap;
    }
    const NumericOptions& o = job.options;
    e << YAML::Key << "options" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "ell" << YAML::Value << o.ell;
    e << YAML::Key << "n" << YAML::Value << o.n;
    e << YAML::Key << "n_min" << YAML::Value << o.n_min;
    e << YAML::Key << "n_max" << YAML::Value << o.n_max;
    e << YAML::Key << "offset" << YAML::Value << o.offset;
    e << YAML::Key << "target_h" << YAML::Value << o.target_h;
    e << YAML::Key << "tol" << YAML::Value << o.tol;
    e << YAML::Key << "richardson" << YAML::Value << o.richardson;
    e << YAML::Key << "half_line" << YAML::Value << o.half_line;
    e << YAML::Key << "method" << YAML::Value << o.method;
    e << YAML::Key << "workers" << YAML::Value << o.workers;
    e << YAML::Key << "samples" << YAML::Value << o.samples;
    e << YAML::Key << "tail_fraction" << YAML::Value << o.tail_fraction;
    e << YAML::Key << "trend_tol" << YAML::Value << o.trend_tol;
    e << YAML::EndMap;
    const OutputPaths& out = job.outputs;
    if (!out.json.empty() || !out.csv.empty() || !out.gnuplot.empty()) {
        e << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
        if (!out.json.empty()) e << YAML::Key << "json" << YAML::Value << out.json;
        if (!out.csv.empty()) e << YAML::Key << "csv" << YAML::Value << out.csv;
        if (!out.gnuplot.empty()) e << YAML::Key << "gnuplot" << YAML::Value << out.gnuplot;
        e << YAML::EndMap;
    }
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

}  // namespace locspec
