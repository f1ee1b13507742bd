#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsv/embedding.hpp"
#include "qsv/serp.hpp"
#include "qsv/session.hpp"
#include "qsv/stats/bootstrap.hpp"
#include "qsv/stats/cluster.hpp"
#include "qsv/stats/factor_analysis.hpp"
#include "qsv/stats/mutual_information.hpp"

namespace qsv::pipeline {

struct AugmentSettings {
    std::optional<std::string> endpoint;
    std::size_t k = 10;
    std::size_t concurrency = 4;
};

struct BootstrapSettings {
    std::size_t iterations = 1000;
    std::vector<stats::BootstrapMode> modes{stats::BootstrapMode::WithinSimulator,
                                            stats::BootstrapMode::CrossSimulator};
};

/// Every setting of a run. Paths are kept as written; relative ones resolve
/// against base_dir.
struct RunConfig {
    std::filesystem::path base_dir = ".";

    std::optional<std::string> real;
    std::optional<std::string> simulated;
    std::optional<std::string> qrels;
    std::optional<std::string> wordnet_dir;
    std::optional<std::string> annotations;
    std::optional<ProviderConfig> embeddings;

    PairingMode pairing = PairingMode::OneToOne;
    /// Explicit toggles only. Absent measures are enabled when their inputs
    /// are configured.
    std::map<std::string, bool> measures;
    std::size_t cutoff_k = 10;
    RboParams rbo;

    std::optional<int> nmi_bins;
    stats::NonlinearThresholds thresholds;
    stats::EfaOptions efa;
    BootstrapSettings bootstrap;
    /// Empty means the built-in taxonomy clusters.
    std::vector<stats::Cluster> clusters;
    bool heatmap = false;

    AugmentSettings augment;
    std::string out = "out";
    std::uint64_t seed = 42;

    std::filesystem::path resolve(const std::string& path) const;
};

/// Parses a config document. Unknown keys are ConfigErrors.
RunConfig parse_config(const nlohmann::ordered_json& doc, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical form with every default spelled out. The output directory is
/// excluded so that runs into different directories share a digest.
nlohmann::ordered_json config_to_json(const RunConfig& config);
std::string config_digest(const RunConfig& config);

/// Measure names in column order.
const std::vector<std::string>& measure_catalog();

/// Clusters used when the config defines none.
std::vector<stats::Cluster> default_clusters();

/// Measures that will be computed, in catalog order. Throws ConfigError when
/// an explicitly enabled measure lacks its input.
std::vector<std::string> enabled_measures(const RunConfig& config);

}  // namespace qsv::pipeline
