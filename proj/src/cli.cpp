#include "locspec/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "locspec/battery.hpp"
#include "locspec/config.hpp"
#include "locspec/form.hpp"
#include "locspec/partition.hpp"
#include "locspec/report.hpp"
#include "locspec/scanner.hpp"
#include "locspec/shooting.hpp"

namespace locspec {

namespace {

using nlohmann::json;

struct Overrides {
    std::string config_path;
    bool dump = false;
    std::optional<double> ell, offset, target_h, tol;
    std::optional<long> n, n_min, n_max;
    std::optional<bool> richardson, half_line;
    std::optional<std::string> method, out_json, out_csv, out_gnuplot;
    std::optional<int> workers;
};

void add_common(CLI::App& app, Overrides& o) {
    app.add_option("config", o.config_path, "YAML or JSON job description");
    app.add_flag("--dump-config", o.dump, "Print the resolved job as YAML and exit");
    app.add_option("--ell", o.ell, "Window length");
    app.add_option("--n", o.n, "Window index for eig");
    app.add_option("--n-min", o.n_min, "First window index");
    app.add_option("--n-max", o.n_max, "Last window index");
    app.add_option("--offset", o.offset, "Window offset a");
    app.add_option("--target-h", o.target_h, "Target mesh width");
    app.add_option("--tol", o.tol, "Eigenvalue tolerance");
    app.add_option("--richardson", o.richardson, "Richardson extrapolation over h and h/2 (true/false)");
    app.add_option("--half-line", o.half_line, "Scan n >= 0 only (true/false)");
    app.add_option("--method", o.method, "fem or shooting (eig only)");
    app.add_option("--out-json", o.out_json, "JSON report path");
    app.add_option("--out-csv", o.out_csv, "CSV path");
    app.add_option("--out-gnuplot", o.out_gnuplot, "Two-column n/lambda dump (scan, bound)");
    app.add_option("--workers", o.workers, "Worker threads for scans (0 = all cores)");
}

// Flags win over the file; an overridden key loses its source line.
template <typename T, typename U>
void apply(ParsedJob& parsed, const std::optional<T>& flag, U& field, const std::string& key) {
    if (!flag) return;
    field = *flag;
    auto& lines = parsed.lines;
    lines.erase(std::remove_if(lines.begin(), lines.end(), [&](const auto& kv) { return kv.first == key; }),
                lines.end());
}

HermitianPotential job_potential(const JobConfig& job) {
    return job.potential ? build_potential(*job.potential) : HermitianPotential::zero(1);
}

void emit(const JobConfig& job, const std::string& json_text, std::ostream& out) {
    if (job.outputs.json.empty()) {
        out << json_text;
    } else {
        write_atomic(job.outputs.json, json_text);
    }
}

int run_eig(const JobConfig& job, std::ostream& out, std::ostream& err) {
    const NumericOptions& o = job.options;
    const HermitianPotential p = job_potential(job);
    const Window w{o.n, o.ell, o.offset};
    const Interval iv = w.interval();
    WindowValue v;
    try {
        v = lambda_window(p, w, {o.target_h, o.tol, o.richardson});
    } catch (const Error& ex) {
        err << "error: window n = " << o.n << " failed: " << ex.what() << "\n";
        return kExitNumeric;
    }
    json doc{{"task", "eig"},
             {"n", o.n},
             {"a_left", iv.lo},
             {"b_right", iv.hi},
             {"lambda", v.lambda},
             {"lambda_coarse", v.lambda_coarse},
             {"residual", v.eigen.residual},
             {"mesh_h", v.mesh_h},
             {"extrapolated", v.extrapolated},
             {"iterations", v.eigen.iterations},
             {"method", o.method}};
    if (o.method == "shooting") {
        try {
            const double window = 0.05 * (1.0 + std::abs(v.lambda));
            const OracleCheck check = oracle_check(p, iv, v.lambda, window);
            doc["shooting"] = {{"mode", check.mode == OracleCheck::Mode::sign_change ? "sign_change" : "modulus_dip"},
                               {"bracketed", check.bracketed},
                               {"lambda", check.refined_lambda},
                               {"det", check.det_at_refined},
                               {"difference", check.refined_lambda - v.lambda}};
        } catch (const Error& ex) {
            err << "error: window n = " << o.n << " shooting failed: " << ex.what() << "\n";
            return kExitNumeric;
        }
    }

    if (!job.outputs.csv.empty()) {
        Mesh mesh = build_mesh(p, iv, o.target_h);
        if (v.extrapolated) mesh = refine(mesh);
        const int m = p.dimension();
        std::ostringstream csv;
        csv << "x";
        for (int c = 0; c < m; ++c) csv << ",re_" << c << ",im_" << c;
        csv << "\n";
        const auto& x = mesh.nodes();
        for (std::size_t i = 0; i < x.size(); ++i) {
            csv << format_double(x[i]);
            for (int c = 0; c < m; ++c) {
                Complex z = 0.0;
                if (i > 0 && i + 1 < x.size()) z = v.eigen.vector[static_cast<Eigen::Index>((i - 1) * m + c)];
                csv << ',' << format_double(z.real()) << ',' << format_double(z.imag());
            }
            csv << "\n";
        }
        write_atomic(job.outputs.csv, csv.str());
    }
    emit(job, doc.dump(2) + "\n", out);
    return kExitOk;
}

int run_scan(const JobConfig& job, bool bound_only, std::ostream& out, std::ostream& err) {
    const NumericOptions& o = job.options;
    const HermitianPotential p = job_potential(job);
    ScanOptions so;
    so.window = {o.target_h, o.tol, o.richardson};
    so.half_line = o.half_line;
    so.workers = o.workers;
    const ScanReport report = scan(p, o.ell, o.n_min, o.n_max, o.offset, so);
    const Diagnosis d = diagnose(report, {o.tail_fraction, o.trend_tol});

    if (!job.outputs.csv.empty()) write_atomic(job.outputs.csv, scan_csv(report));
    if (!job.outputs.gnuplot.empty()) write_atomic(job.outputs.gnuplot, scan_gnuplot(report));
    if (bound_only) {
        json doc{{"task", "bound"},
                 {"ell", report.ell},
                 {"offset", report.offset},
                 {"n_min", report.n_min},
                 {"n_max", report.n_max},
                 {"kappa", report.kappa},
                 {"eight_kappa_squared", 8.0 * report.kappa * report.kappa},
                 {"min_lambda", report.min_lambda},
                 {"global_lower_bound", report.global_lower_bound},
                 {"partial", report.partial}};
        emit(job, doc.dump(2) + "\n", out);
    } else {
        emit(job, scan_json(report, d), out);
    }
    if (const auto bad = report.first_failure()) {
        const auto it = std::find_if(report.entries.begin(), report.entries.end(),
                                     [&](const ScanEntry& e) { return e.n == *bad; });
        err << "error: window n = " << *bad << " failed: " << *it->error << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int run_identity(const JobConfig& job, std::ostream& out) {
    std::vector<NamedPotential> battery;
    if (job.potential) {
        battery.push_back({"configured", build_potential(*job.potential)});
    } else {
        battery = identity_battery();
    }
    const auto rows = run_identity_battery(battery, job.options.ell);
    json items = json::array();
    double max_localization = 0.0;
    double max_parseval = 0.0;
    std::ostringstream csv;
    csv << "potential,test_function,localization_lhs,localization_rhs,localization_residual,parseval_residual\n";
    for (const auto& r : rows) {
        max_localization = std::max(max_localization, r.localization.residual);
        max_parseval = std::max(max_parseval, r.parseval.residual);
        items.push_back({{"potential", r.potential},
                         {"test_function", r.test_function},
                         {"localization", {{"lhs", r.localization.lhs}, {"rhs", r.localization.rhs}, {"residual", r.localization.residual}}},
                         {"parseval",
                          {{"lhs", r.parseval.lhs}, {"rhs", r.parseval.rhs}, {"residual", r.parseval.residual}}}});
        csv << r.potential << ',' << r.test_function << ',' << format_double(r.localization.lhs) << ','
            << format_double(r.localization.rhs) << ',' << format_double(r.localization.residual) << ','
            << format_double(r.parseval.residual) << "\n";
    }
    if (!job.outputs.csv.empty()) write_atomic(job.outputs.csv, csv.str());
    json doc{{"task", "check-identity"},
             {"ell", job.options.ell},
             {"checks", items},
             {"max_localization_residual", max_localization},
             {"max_parseval_residual", max_parseval}};
    emit(job, doc.dump(2) + "\n", out);
    return kExitOk;
}

int run_partition(const JobConfig& job, std::ostream& out) {
    const PartitionFunction pf(job.options.ell);
    const int n = job.options.samples;
    if (!job.outputs.csv.empty()) {
        std::ostringstream csv;
        csv << "x,theta,theta_prime,kappa\n";
        for (int i = 0; i < n; ++i) {
            const double x = pf.ell() * i / (n - 1);
            csv << format_double(x) << ',' << format_double(pf.theta(x)) << ',' << format_double(pf.theta_prime(x))
                << ',' << format_double(pf.kappa()) << "\n";
        }
        write_atomic(job.outputs.csv, csv.str());
    }
    json doc{{"task", "partition"},
             {"ell", pf.ell()},
             {"kappa", pf.kappa()},
             {"eight_kappa_squared", 8.0 * pf.kappa() * pf.kappa()},
             {"identity_deviation", pf.identity_deviation()}};
    emit(job, doc.dump(2) + "\n", out);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Local Dirichlet ground eigenvalues and localization scans for -y'' + Q'y"};
    app.name(args.empty() ? "locspec" : args.front());
    Overrides o;
    add_common(app, o);
    const char* tasks[] = {"eig", "scan", "bound", "check-identity", "partition"};
    std::vector<CLI::App*> subs;
    for (const char* t : tasks) {
        CLI::App* sub = app.add_subcommand(t, std::string("Run the ") + t + " task");
        add_common(*sub, o);
        subs.push_back(sub);
    }
    app.require_subcommand(0, 1);

    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitConfig;
    }

    const std::string source = o.config_path.empty() ? "<flags>" : o.config_path;
    ParsedJob parsed;
    try {
        if (!o.config_path.empty()) parsed = load_job(o.config_path);
        for (const auto* sub : subs) {
            if (sub->parsed()) parsed.job.task = sub->get_name();
        }
        NumericOptions& opt = parsed.job.options;
        apply(parsed, o.ell, opt.ell, "options.ell");
        apply(parsed, o.n, opt.n, "options.n");
        apply(parsed, o.n_min, opt.n_min, "options.n_min");
        apply(parsed, o.n_max, opt.n_max, "options.n_max");
        apply(parsed, o.offset, opt.offset, "options.offset");
        apply(parsed, o.target_h, opt.target_h, "options.target_h");
        apply(parsed, o.tol, opt.tol, "options.tol");
        apply(parsed, o.richardson, opt.richardson, "options.richardson");
        apply(parsed, o.half_line, opt.half_line, "options.half_line");
        apply(parsed, o.method, opt.method, "options.method");
        apply(parsed, o.out_json, parsed.job.outputs.json, "outputs.json");
        apply(parsed, o.out_csv, parsed.job.outputs.csv, "outputs.csv");
        apply(parsed, o.out_gnuplot, parsed.job.outputs.gnuplot, "outputs.gnuplot");
        if (o.workers) {
            apply(parsed, o.workers, opt.workers, "options.workers");
        } else if (const char* env = std::getenv("LOCSPEC_WORKERS")) {
            char* end = nullptr;
            const long w = std::strtol(env, &end, 10);
            if (end == env || *end != '\0' || w < 0 || w > 4096) {
                throw ConfigError("LOCSPEC_WORKERS must be a non-negative integer", std::nullopt, "environment");
            }
            opt.workers = static_cast<int>(w);
        }
        validate_job(parsed, source);
    } catch (const ConfigError& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitConfig;
    }

    if (o.dump) {
        out << dump_job(parsed.job);
        return kExitOk;
    }

    const JobConfig& job = parsed.job;
    try {
        if (job.task == "eig") return run_eig(job, out, err);
        if (job.task == "scan") return run_scan(job, false, out, err);
        if (job.task == "bound") return run_scan(job, true, out, err);
        if (job.task == "check-identity") return run_identity(job, out);
        return run_partition(job, out);
    } catch (const ValidationError& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitConfig;
    } catch (const IoError& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitIo;
    } catch (const Error& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace locspec
