#include "qsv/pipeline/analysis.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "qsv/errors.hpp"
#include "qsv/pipeline/outputs.hpp"

namespace qsv::pipeline {

using nlohmann::ordered_json;

std::vector<Dataset> load_datasets(const std::vector<std::filesystem::path>& paths) {
    std::vector<Dataset> out;
    std::set<std::string> labels;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        std::string label = paths[i].stem().string();
        if (label.empty() || labels.contains(label)) label += "_" + std::to_string(i + 1);
        labels.insert(label);
        out.push_back({label, stats::load_matrix_csv(paths[i].string())});
    }
    return out;
}

namespace {

ordered_json matrix_json(const Eigen::MatrixXd& m) {
    auto rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json efa_json(const stats::FactorSolution& s, const stats::EfaOptions& options, const std::string& digest) {
    auto doc = report_header(digest);
    doc["estimator"] = "principal_axis";
    doc["rotation"] = "varimax";
    doc["retention"] = options.n_factors ? "fixed" : "kaiser";
    doc["n_factors"] = s.n_factors;
    doc["converged"] = s.converged;
    doc["iterations"] = s.iterations;
    doc["rows_used"] = s.rows_used;
    doc["measures"] = s.names;
    doc["dropped_columns"] = s.dropped_columns;
    doc["eigenvalues"] = s.eigenvalues;
    doc["explained_variance"] = s.explained_variance;
    doc["communalities"] = s.communalities;
    doc["uniquenesses"] = s.uniquenesses;
    doc["loadings"] = matrix_json(s.loadings);
    doc["unrotated_loadings"] = matrix_json(s.unrotated_loadings);
    doc["warnings"] = s.warnings;
    return doc;
}

ordered_json flags_json(const std::vector<stats::FlaggedPair>& flagged, const RunConfig& config, const std::string& digest) {
    auto doc = report_header(digest);
    doc["bins"] = config.nmi_bins ? ordered_json(*config.nmi_bins) : ordered_json("ceil_sqrt_n");
    doc["nmi_threshold"] = config.thresholds.nmi;
    doc["linear_threshold"] = config.thresholds.linear;
    auto pairs = ordered_json::array();
    for (const auto& f : flagged) {
        pairs.push_back({{"a", f.a}, {"b", f.b}, {"nmi", f.nmi}, {"pearson", f.pearson}, {"kendall", f.kendall}});
    }
    doc["flagged_pairs"] = std::move(pairs);
    return doc;
}

ordered_json cluster_mean_json(const stats::ClusterMean& m) {
    return {{"mean", optional_number(m.mean)},
            {"datasets_used", m.datasets_used},
            {"pairs_used", m.pairs_used},
            {"pairs_masked", m.pairs_masked}};
}

ordered_json clusters_json(const stats::ClusterAverages& avg) {
    ordered_json doc;
    auto within = ordered_json::array();
    for (std::size_t i = 0; i < avg.clusters.size(); ++i) {
        ordered_json entry{{"name", avg.clusters[i].name}, {"members", avg.clusters[i].members}};
        entry.update(cluster_mean_json(avg.within[i]));
        within.push_back(std::move(entry));
    }
    auto cross = ordered_json::array();
    for (const auto& c : avg.cross) {
        ordered_json entry{{"a", c.a}, {"b", c.b}};
        entry.update(cluster_mean_json(c.value));
        cross.push_back(std::move(entry));
    }
    doc["within"] = std::move(within);
    doc["cross"] = std::move(cross);
    return doc;
}

// Built-in clusters restricted to columns every dataset has.
std::vector<stats::Cluster> effective_clusters(const RunConfig& config, const std::vector<Dataset>& datasets) {
    if (!config.clusters.empty()) return config.clusters;
    std::vector<stats::Cluster> out;
    for (auto cluster : default_clusters()) {
        std::erase_if(cluster.members, [&](const std::string& name) {
            return std::any_of(datasets.begin(), datasets.end(),
                               [&](const Dataset& d) { return !d.matrix.column_index(name); });
        });
        if (!cluster.members.empty()) out.push_back(std::move(cluster));
    }
    return out;
}

}  // namespace

AnalysisBundle run_analysis(const std::vector<Dataset>& datasets, const RunConfig& config,
                            const std::filesystem::path& out_dir) {
    if (datasets.empty()) throw ConfigError("analysis needs at least one measure matrix");
    for (const auto& d : datasets) {
        if (d.matrix.cols() < 2) {
            throw AnalysisError("dataset '" + d.label + "' has " + std::to_string(d.matrix.cols()) +
                                " measure columns; analysis needs at least 2");
        }
    }

    const std::string digest = config_digest(config);
    const std::string comment = provenance_line(digest);
    AnalysisBundle bundle;
    auto attempt = [&](const std::string& artifact, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            bundle.failures.push_back({artifact, e.what()});
        }
    };
    auto emit = [&](const std::filesystem::path& relative, const std::string& content) {
        write_file_atomic(out_dir / relative, content);
        bundle.written.push_back(relative.generic_string());
    };

    for (const auto& d : datasets) {
        const std::filesystem::path dir = datasets.size() == 1 ? std::filesystem::path() : std::filesystem::path(d.label);
        const auto& pearson = bundle.pearson.emplace_back(stats::correlation_matrix(d.matrix, stats::CorrelationMethod::Pearson));
        const auto& kendall = bundle.kendall.emplace_back(stats::correlation_matrix(d.matrix, stats::CorrelationMethod::Kendall));
        const auto& nmi = bundle.nmi.emplace_back(stats::nmi_matrix(d.matrix, config.nmi_bins));
        auto& efa = bundle.efa.emplace_back();

        attempt((dir / "pearson.csv").generic_string(),
                [&] { emit(dir / "pearson.csv", square_csv(pearson.names, pearson.values, comment)); });
        attempt((dir / "kendall.csv").generic_string(),
                [&] { emit(dir / "kendall.csv", square_csv(kendall.names, kendall.values, comment)); });
        attempt((dir / "nmi.csv").generic_string(), [&] { emit(dir / "nmi.csv", square_csv(nmi.names, nmi.nmi, comment)); });
        attempt((dir / "flags.json").generic_string(), [&] {
            const auto flagged = stats::flag_nonlinear(pearson, kendall, nmi, config.thresholds);
            emit(dir / "flags.json", flags_json(flagged, config, digest).dump(2) + "\n");
        });
        attempt((dir / "efa_loadings.csv").generic_string(), [&] {
            efa = stats::efa(d.matrix, config.efa);
            emit(dir / "efa_loadings.csv", loadings_csv(*efa, comment));
            emit(dir / "efa.json", efa_json(*efa, config.efa, digest).dump(2) + "\n");
        });
        if (config.heatmap) {
            attempt((dir / "heatmap.svg").generic_string(),
                    [&] { emit(dir / "heatmap.svg", heatmap_svg(pearson, comment)); });
        }
    }

    attempt("cluster_averages.json", [&] {
        const auto clusters = effective_clusters(config, datasets);
        bundle.pearson_clusters = stats::cluster_average_correlation(bundle.pearson, clusters);
        bundle.kendall_clusters = stats::cluster_average_correlation(bundle.kendall, clusters);
        auto doc = report_header(digest);
        auto labels = ordered_json::array();
        for (const auto& d : datasets) labels.push_back(d.label);
        doc["datasets"] = std::move(labels);
        doc["pearson"] = clusters_json(*bundle.pearson_clusters);
        doc["kendall"] = clusters_json(*bundle.kendall_clusters);
        emit("cluster_averages.json", doc.dump(2) + "\n");
    });

    auto manifest = report_header(digest);
    manifest["artifacts"] = bundle.written;
    auto failures = ordered_json::array();
    for (const auto& f : bundle.failures) failures.push_back({{"artifact", f.artifact}, {"error", f.message}});
    manifest["failures"] = std::move(failures);
    write_file_atomic(out_dir / "analysis.json", manifest.dump(2) + "\n");
    return bundle;
}

}  // namespace qsv::pipeline
