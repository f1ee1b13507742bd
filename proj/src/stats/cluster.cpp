#include "qsv/stats/cluster.hpp"

#include "qsv/errors.hpp"

namespace qsv::stats {

namespace {

using IndexPairs = std::vector<std::pair<std::size_t, std::size_t>>;

std::vector<std::size_t> member_indices(const CorrelationMatrix& m, const Cluster& cluster, std::size_t dataset) {
    std::vector<std::size_t> out;
    for (const auto& name : cluster.members) {
        const auto idx = m.index_of(name);
        if (!idx) {
            throw AnalysisError("cluster '" + cluster.name + "' references unknown column '" + name + "' in dataset " +
                                std::to_string(dataset));
        }
        out.push_back(*idx);
    }
    return out;
}

// Per-dataset pair mean first, then the unweighted mean over datasets.
ClusterMean average(std::span<const CorrelationMatrix> datasets, const std::vector<IndexPairs>& pairs) {
    ClusterMean out;
    double total = 0.0;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        double sum = 0.0;
        std::size_t used = 0;
        for (const auto& [i, j] : pairs[d]) {
            if (const auto v = datasets[d].at(i, j)) {
                sum += *v;
                ++used;
            } else {
                ++out.pairs_masked;
            }
        }
        out.pairs_used += used;
        if (used > 0) {
            total += sum / static_cast<double>(used);
            ++out.datasets_used;
        }
    }
    if (out.datasets_used > 0) out.mean = total / static_cast<double>(out.datasets_used);
    return out;
}

}  // namespace

ClusterAverages cluster_average_correlation(std::span<const CorrelationMatrix> datasets,
                                            const std::vector<Cluster>& clusters) {
    ClusterAverages out;
    out.clusters = clusters;
    if (!datasets.empty()) out.method = datasets.front().method;

    std::vector<std::vector<std::vector<std::size_t>>> indices(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (std::size_t d = 0; d < datasets.size(); ++d) indices[c].push_back(member_indices(datasets[d], clusters[c], d));
    }

    for (std::size_t c = 0; c < clusters.size(); ++c) {
        std::vector<IndexPairs> pairs(datasets.size());
        for (std::size_t d = 0; d < datasets.size(); ++d) {
            const auto& idx = indices[c][d];
            for (std::size_t a = 0; a < idx.size(); ++a) {
                for (std::size_t b = a + 1; b < idx.size(); ++b) {
                    if (idx[a] != idx[b]) pairs[d].emplace_back(idx[a], idx[b]);
                }
            }
        }
        out.within.push_back(average(datasets, pairs));
    }

    for (std::size_t c1 = 0; c1 < clusters.size(); ++c1) {
        for (std::size_t c2 = c1 + 1; c2 < clusters.size(); ++c2) {
            std::vector<IndexPairs> pairs(datasets.size());
            for (std::size_t d = 0; d < datasets.size(); ++d) {
                for (const std::size_t i : indices[c1][d]) {
                    for (const std::size_t j : indices[c2][d]) {
                        if (i != j) pairs[d].emplace_back(i, j);
                    }
                }
            }
            out.cross.push_back({clusters[c1].name, clusters[c2].name, average(datasets, pairs)});
        }
    }
    return out;
}

}  // namespace qsv::stats
