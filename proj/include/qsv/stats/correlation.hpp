#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qsv/stats/measure_matrix.hpp"

namespace qsv::stats {

enum class CorrelationMethod { Pearson, Kendall };

std::string_view to_string(CorrelationMethod m);

/// A coefficient over pairwise-complete observations. value is nullopt
/// with a reason when fewer than 3 observations remain or a side is
/// constant.
struct Coefficient {
    std::optional<double> value;
    std::size_t n = 0;
    std::string reason;
};

Coefficient pearson(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y);
Coefficient pearson(std::span<const double> x, std::span<const double> y);

/// Tau-b with tie corrections, O(n log n).
Coefficient kendall_tau_b(std::span<const std::optional<double>> x,
                          std::span<const std::optional<double>> y);
Coefficient kendall_tau_b(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
    CorrelationMethod method = CorrelationMethod::Pearson;
    std::vector<std::string> names;
    /// Row-major, names.size() squared; nullopt marks a masked entry.
    std::vector<std::optional<double>> values;
    std::vector<std::size_t> pair_counts;

    std::size_t size() const { return names.size(); }
    std::optional<double> at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
    std::size_t count(std::size_t i, std::size_t j) const { return pair_counts[i * size() + j]; }
    std::optional<std::size_t> index_of(std::string_view name) const;
};

CorrelationMatrix correlation_matrix(const MeasureMatrix& m, CorrelationMethod method);

}  // namespace qsv::stats
