#include "qsv/pipeline/resampling.hpp"

#include "qsv/errors.hpp"
#include "qsv/pipeline/outputs.hpp"

namespace qsv::pipeline {

using nlohmann::ordered_json;

stats::BootstrapInput bootstrap_input(const MeasureRun& run) {
    stats::BootstrapInput input;
    input.measures = run.measures;
    const auto& keys = run.matrix.row_keys();
    for (std::size_t r = 0; r < keys.size(); ++r) {
        const auto& key = keys[r];
        if (input.groups.empty() || input.groups.back().simulator_id != key.simulator_id ||
            input.groups.back().session_id != key.session_id) {
            input.groups.push_back({key.simulator_id, key.session_id, {}});
        }
        input.groups.back().candidates.push_back({key.simulator_id, key.rank, run.matrix.row(r)});
    }
    return input;
}

std::string bootstrap_json(const std::vector<stats::BootstrapReport>& reports, const std::vector<std::string>& measures,
                           const std::string& digest) {
    auto doc = report_header(digest);
    doc["measures"] = measures;
    auto quantile_labels = ordered_json::array();
    for (const double q : stats::kDeviationQuantiles) quantile_labels.push_back(q);
    doc["quantiles"] = std::move(quantile_labels);
    auto list = ordered_json::array();
    for (const auto& r : reports) {
        ordered_json entry;
        entry["mode"] = std::string(stats::to_string(r.mode));
        entry["iterations"] = r.iterations;
        entry["seed"] = r.seed;
        entry["rng_algorithm"] = r.rng_algorithm;
        entry["degenerate"] = r.degenerate;
        entry["warnings"] = r.warnings;
        auto methods = ordered_json::array();
        for (const auto& m : r.methods) {
            auto pairs = ordered_json::array();
            for (const auto& p : m.pairs) {
                pairs.push_back({{"a", p.a}, {"b", p.b}, {"samples", p.samples}, {"max", p.max}, {"quantiles", p.quantiles}});
            }
            methods.push_back({{"method", std::string(stats::to_string(m.method))},
                               {"max_abs_deviation", m.max_abs_deviation},
                               {"pairs", std::move(pairs)}});
        }
        entry["methods"] = std::move(methods);
        list.push_back(std::move(entry));
    }
    doc["reports"] = std::move(list);
    return doc.dump(2) + "\n";
}

std::vector<stats::BootstrapReport> run_bootstrap(const RunConfig& config, const MeasureInputs& inputs,
                                                  const std::filesystem::path& out_dir) {
    if (config.bootstrap.iterations == 0) throw ConfigError("bootstrap iterations must be positive");
    if (config.bootstrap.modes.empty()) throw ConfigError("no bootstrap mode configured");
    const auto measures = enabled_measures(config);
    const MeasureRun run = compute_measures(config, inputs, measures, PairingMode::OneToMany);
    const auto input = bootstrap_input(run);

    std::vector<stats::BootstrapReport> reports;
    for (const auto mode : config.bootstrap.modes) {
        reports.push_back(stats::bootstrap_correlations(input, config.bootstrap.iterations, config.seed, mode));
    }
    write_file_atomic(out_dir / "bootstrap.json", bootstrap_json(reports, measures, config_digest(config)));
    return reports;
}

std::vector<stats::BootstrapReport> run_bootstrap(const RunConfig& config, const std::filesystem::path& out_dir) {
    if (config.bootstrap.iterations == 0) throw ConfigError("bootstrap iterations must be positive");
    return run_bootstrap(config, load_inputs(config, enabled_measures(config)), out_dir);
}

}  // namespace qsv::pipeline
