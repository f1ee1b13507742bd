// Command-line front end: augment, measure, analyze, bootstrap, report.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsv/errors.hpp"
#include "qsv/pipeline/analysis.hpp"
#include "qsv/pipeline/augment.hpp"
#include "qsv/pipeline/config.hpp"
#include "qsv/pipeline/measures.hpp"
#include "qsv/pipeline/report.hpp"
#include "qsv/pipeline/resampling.hpp"
#include "qsv/version.hpp"

namespace fs = std::filesystem;
using namespace qsv;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitAnalysis = 3;

struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> real;
    std::optional<std::string> simulated;
    std::optional<std::string> qrels;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> pairing;
    bool heatmap = false;
    std::optional<std::size_t> k;
    std::optional<double> rbo_p;
    std::optional<std::size_t> iterations;
    std::vector<std::string> matrices;
    std::optional<std::string> endpoint;
    std::optional<std::size_t> concurrency;
};

void add_inputs(CLI::App* cmd, Flags& f) {
    cmd->add_option("--real", f.real, "Real sessions JSON");
    cmd->add_option("--simulated", f.simulated, "Simulated sessions JSON");
}

void add_measure_flags(CLI::App* cmd, Flags& f) {
    add_inputs(cmd, f);
    cmd->add_option("--qrels", f.qrels, "TREC qrels file");
    cmd->add_option("--pairing", f.pairing, "one-to-one or one-to-many");
    cmd->add_option("--k", f.k, "Metric cutoff");
    cmd->add_option("--rbo-p", f.rbo_p, "RBO persistence");
}

void add_bootstrap_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--seed", f.seed, "Resampling seed");
    cmd->add_option("--iterations", f.iterations, "Bootstrap iterations");
}

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "Run configuration JSON");
    cmd->add_option("--out", f.out, "Output directory");
}

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

// Flags win over the config file. Flag paths are relative to the working
// directory.
pipeline::RunConfig resolve_config(const Flags& f) {
    pipeline::RunConfig c;
    c.base_dir = fs::current_path();
    if (f.config) c = pipeline::load_config(*f.config);
    if (f.real) c.real = absolute(*f.real);
    if (f.simulated) c.simulated = absolute(*f.simulated);
    if (f.qrels) c.qrels = absolute(*f.qrels);
    if (f.seed) c.seed = *f.seed;
    if (f.pairing) c.pairing = parse_pairing_mode(*f.pairing);
    if (f.heatmap) c.heatmap = true;
    if (f.k) {
        c.cutoff_k = *f.k;
        c.augment.k = *f.k;
    }
    if (f.rbo_p) c.rbo.p = *f.rbo_p;
    if (f.iterations) c.bootstrap.iterations = *f.iterations;
    if (f.endpoint) c.augment.endpoint = *f.endpoint;
    if (f.concurrency) c.augment.concurrency = *f.concurrency;
    validate(c.rbo);
    return c;
}

fs::path out_dir(const Flags& f, const pipeline::RunConfig& c) { return f.out ? fs::path(*f.out) : c.resolve(c.out); }

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int report_failures(const std::vector<pipeline::ArtifactFailure>& failures) {
    for (const auto& f : failures) std::cerr << "error: " << f.artifact << ": " << f.message << "\n";
    return failures.empty() ? 0 : kExitAnalysis;
}

int cmd_augment(const Flags& f) {
    const auto c = resolve_config(f);
    if (!c.augment.endpoint) throw ConfigError("no search endpoint given (config.augment.endpoint or --endpoint)");
    if (!c.real && !c.simulated) throw ConfigError("augment needs --real and/or --simulated");
    const auto dir = out_dir(f, c);
    pipeline::AugmentOptions options{*c.augment.endpoint, c.augment.k, c.augment.concurrency, {}};
    auto run = [&](const std::string& path, SessionKind kind) {
        const fs::path in = c.resolve(path);
        const fs::path target = dir / (in.stem().string() + ".augmented.json");
        const auto result = pipeline::augment_file(in, kind, target, options);
        std::cout << target.string() << ": " << result.requests << " SERPs fetched\n";
    };
    if (c.real) run(*c.real, SessionKind::Real);
    if (c.simulated) run(*c.simulated, SessionKind::Simulated);
    return 0;
}

int cmd_measure(const Flags& f) {
    const auto c = resolve_config(f);
    const auto dir = out_dir(f, c);
    const auto run = pipeline::run_measures(c, dir);
    print_warnings(run.warnings);
    std::cout << "wrote " << (dir / "measures.jsonl").string() << " (" << run.matrix.rows() << " pairs, "
              << run.measures.size() << " measures)\n";
    return 0;
}

int cmd_analyze(const Flags& f) {
    const auto c = resolve_config(f);
    const auto dir = out_dir(f, c);
    std::vector<fs::path> paths;
    for (const auto& m : f.matrices) paths.emplace_back(m);
    if (paths.empty()) paths.push_back(dir / "measures.csv");
    const auto bundle = pipeline::run_analysis(pipeline::load_datasets(paths), c, dir);
    for (const auto& w : bundle.written) std::cout << "wrote " << (dir / w).string() << "\n";
    return report_failures(bundle.failures);
}

int cmd_bootstrap(const Flags& f) {
    const auto c = resolve_config(f);
    const auto dir = out_dir(f, c);
    const auto reports = pipeline::run_bootstrap(c, dir);
    for (const auto& r : reports) {
        print_warnings(r.warnings);
        std::cout << stats::to_string(r.mode) << ":";
        for (const auto& m : r.methods) std::cout << " " << stats::to_string(m.method) << " max " << m.max_abs_deviation;
        std::cout << "\n";
    }
    return 0;
}

int cmd_report(const Flags& f) {
    const auto c = resolve_config(f);
    const auto dir = out_dir(f, c);
    const auto report = pipeline::run_report(c, dir);
    print_warnings(report.measures.warnings);
    for (const auto& r : report.bootstrap) print_warnings(r.warnings);
    std::cout << "wrote report to " << dir.string() << "\n";
    return report_failures(report.analysis.failures);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Validation measures and relationship analysis for simulated queries", "qsv"};
    app.set_version_flag("--version", std::string(kToolkitName) + " " + kToolkitVersion);
    app.require_subcommand(1);
    Flags f;

    auto* augment = app.add_subcommand("augment", "Fill empty SERPs from a search endpoint");
    add_common(augment, f);
    add_inputs(augment, f);
    augment->add_option("--endpoint", f.endpoint, "Search endpoint URL");
    augment->add_option("--k", f.k, "Documents per SERP");
    augment->add_option("--concurrency", f.concurrency, "Requests in flight");

    auto* measure = app.add_subcommand("measure", "Compute the measure matrix");
    add_common(measure, f);
    add_measure_flags(measure, f);

    auto* analyze = app.add_subcommand("analyze", "Correlations, NMI, EFA and cluster averages");
    add_common(analyze, f);
    analyze->add_option("--matrix", f.matrices, "Measure matrix CSV (repeat for several datasets)");
    analyze->add_flag("--heatmap", f.heatmap, "Write heatmap.svg");

    auto* bootstrap = app.add_subcommand("bootstrap", "Resample simulated queries per topic");
    add_common(bootstrap, f);
    add_measure_flags(bootstrap, f);
    add_bootstrap_flags(bootstrap, f);

    auto* report = app.add_subcommand("report", "measure, analyze and bootstrap");
    add_common(report, f);
    add_measure_flags(report, f);
    add_bootstrap_flags(report, f);
    report->add_flag("--heatmap", f.heatmap, "Write heatmap.svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*augment) return cmd_augment(f);
        if (*measure) return cmd_measure(f);
        if (*analyze) return cmd_analyze(f);
        if (*bootstrap) return cmd_bootstrap(f);
        return cmd_report(f);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const AnalysisError& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return kExitAnalysis;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
}
