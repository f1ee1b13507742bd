#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsv/stats/correlation.hpp"

namespace qsv::stats {

enum class BootstrapMode { WithinSimulator, CrossSimulator };

std::string_view to_string(BootstrapMode m);
BootstrapMode parse_bootstrap_mode(std::string_view text);

/// Measure values of one simulated query, computed once and reused by every
/// iteration.
struct Candidate {
    std::string simulator_id;
    std::int64_t rank = 1;
    Series values;
};

/// One (simulator, session) row of the baseline matrix. candidates[0] is
/// the top-1 query used by the baseline.
struct CandidateGroup {
    std::string simulator_id;
    std::string session_id;
    std::vector<Candidate> candidates;
};

struct BootstrapInput {
    std::vector<std::string> measures;
    std::vector<CandidateGroup> groups;
};

inline constexpr double kDeviationQuantiles[] = {0.5, 0.9, 0.95, 0.99};

struct PairDeviation {
    std::string a;
    std::string b;
    std::size_t samples = 0;
    double max = 0.0;
    /// Nearest-rank quantiles at kDeviationQuantiles.
    std::vector<double> quantiles;
};

struct MethodDeviation {
    CorrelationMethod method = CorrelationMethod::Pearson;
    double max_abs_deviation = 0.0;
    std::vector<PairDeviation> pairs;
};

struct BootstrapReport {
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    BootstrapMode mode = BootstrapMode::WithinSimulator;
    std::string rng_algorithm;
    bool degenerate = false;
    std::vector<MethodDeviation> methods;
    std::vector<std::string> warnings;
};

/// Redraws one candidate per group per iteration and records the absolute
/// deviation of each Pearson and Kendall coefficient from the baseline.
/// Iteration i draws from StreamRng(seed, i), so the report is identical
/// for a fixed seed regardless of evaluation order.
BootstrapReport bootstrap_correlations(const BootstrapInput& input, std::size_t iterations,
                                       std::uint64_t seed, BootstrapMode mode);

/// Nearest-rank quantile of an ascending-sorted sample.
double nearest_rank_quantile(const std::vector<double>& sorted, double q);

}  // namespace qsv::stats
