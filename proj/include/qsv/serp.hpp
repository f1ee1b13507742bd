#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "qsv/retrieval.hpp"

namespace qsv {

enum class RboVariant { Base, Extrapolated };

std::string_view to_string(RboVariant v);
RboVariant parse_rbo_variant(std::string_view text);

struct RboParams {
    double p = 0.9;
    std::size_t depth = 10;
    RboVariant variant = RboVariant::Extrapolated;
};

/// Validates 0 < p < 1 and depth >= 1; throws ConfigError.
void validate(const RboParams& params);

/// Jaccard over the doc-id sets of the (optionally truncated) lists.
/// nullopt when both are empty after truncation.
std::optional<double> serp_jaccard(const RankedList& a, const RankedList& b,
                                   std::optional<std::size_t> cutoff = std::nullopt);

/// Rank-biased overlap over both lists truncated to min(depth, |a|, |b|).
/// nullopt when both lists are empty; 0 when exactly one is.
std::optional<double> rbo(const RankedList& a, const RankedList& b, const RboParams& params);

}  // namespace qsv
