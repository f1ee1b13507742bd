#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qsv/pipeline/config.hpp"
#include "qsv/stats/cluster.hpp"
#include "qsv/stats/correlation.hpp"
#include "qsv/stats/factor_analysis.hpp"
#include "qsv/stats/measure_matrix.hpp"
#include "qsv/stats/mutual_information.hpp"

namespace qsv::pipeline {

struct Dataset {
    std::string label;
    stats::MeasureMatrix matrix;
};

/// Labels are file stems, suffixed with an index when they collide.
std::vector<Dataset> load_datasets(const std::vector<std::filesystem::path>& paths);

struct ArtifactFailure {
    std::string artifact;
    std::string message;
};

struct AnalysisBundle {
    std::vector<stats::CorrelationMatrix> pearson;  // one per dataset
    std::vector<stats::CorrelationMatrix> kendall;
    std::vector<stats::NmiReport> nmi;
    std::vector<std::optional<stats::FactorSolution>> efa;
    std::optional<stats::ClusterAverages> pearson_clusters;
    std::optional<stats::ClusterAverages> kendall_clusters;
    /// Paths relative to the output directory, in write order.
    std::vector<std::string> written;
    std::vector<ArtifactFailure> failures;
};

/// Correlations, NMI, flags, EFA and optional heatmap per dataset, plus
/// cluster averages across datasets. A single dataset writes into out_dir;
/// several write into out_dir/<label>. A failing artifact is recorded and
/// the rest are still written.
AnalysisBundle run_analysis(const std::vector<Dataset>& datasets, const RunConfig& config,
                            const std::filesystem::path& out_dir);

}  // namespace qsv::pipeline
