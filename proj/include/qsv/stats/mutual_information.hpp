#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsv/stats/correlation.hpp"
#include "qsv/stats/measure_matrix.hpp"

namespace qsv::stats {

/// ceil(sqrt(n)), at least 2.
int default_bin_count(std::size_t n);

/// Equal-frequency bin per value: floor(first_rank * bins / n) where
/// first_rank is the 0-based sorted position of the value's first
/// occurrence, so tied values share the lower bin.
std::vector<int> equal_frequency_bins(std::span<const double> values, int bins);

/// MI / ((H(X) + H(Y)) / 2) with natural logarithms over pairwise-complete
/// observations. nullopt for fewer than `bins` observations or a constant
/// side; 0 when binning collapses a side to a single bin.
std::optional<double> nmi(std::span<const std::optional<double>> x,
                          std::span<const std::optional<double>> y, int bins);
std::optional<double> nmi(std::span<const double> x, std::span<const double> y, int bins);

struct NonlinearThresholds {
    double nmi = 0.5;
    double linear = 0.3;
};

struct FlaggedPair {
    std::string a;
    std::string b;
    double nmi = 0.0;
    double pearson = 0.0;
    double kendall = 0.0;
};

struct NmiReport {
    std::vector<std::string> names;
    /// Row-major symmetric matrix; nullopt where undefined.
    std::vector<std::optional<double>> nmi;
    std::vector<FlaggedPair> flagged_pairs;
    /// Bin count used; nullopt means default_bin_count per pair.
    std::optional<int> bins;

    std::optional<double> at(std::size_t i, std::size_t j) const { return nmi[i * names.size() + j]; }
};

/// All-pairs NMI. Without an explicit bin count each pair uses
/// default_bin_count of its complete-observation count.
NmiReport nmi_matrix(const MeasureMatrix& m, std::optional<int> bins = std::nullopt);

/// Pairs with high NMI but weak linear and monotonic association, sorted by
/// NMI descending. Pairs with an undefined coefficient are not flagged.
std::vector<FlaggedPair> flag_nonlinear(const CorrelationMatrix& pearson, const CorrelationMatrix& kendall,
                                        const NmiReport& nmi, const NonlinearThresholds& thresholds);

}  // namespace qsv::stats
