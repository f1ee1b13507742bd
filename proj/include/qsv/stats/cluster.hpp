#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qsv/stats/correlation.hpp"

namespace qsv::stats {

struct Cluster {
    std::string name;
    std::vector<std::string> members;
};

struct ClusterMean {
    /// Unweighted mean across datasets of the per-dataset pair means.
    std::optional<double> mean;
    std::size_t datasets_used = 0;
    std::size_t pairs_used = 0;
    std::size_t pairs_masked = 0;
};

struct CrossClusterMean {
    std::string a;
    std::string b;
    ClusterMean value;
};

struct ClusterAverages {
    CorrelationMethod method = CorrelationMethod::Pearson;
    std::vector<Cluster> clusters;
    std::vector<ClusterMean> within;  // parallel to clusters
    std::vector<CrossClusterMean> cross;
};

/// Averages over measure pairs inside each dataset first, then across
/// datasets. Throws AnalysisError when a member is missing from a matrix.
ClusterAverages cluster_average_correlation(std::span<const CorrelationMatrix> datasets,
                                            const std::vector<Cluster>& clusters);

}  // namespace qsv::stats
