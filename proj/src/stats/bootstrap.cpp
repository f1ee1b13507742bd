#include "qsv/stats/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qsv/errors.hpp"
#include "qsv/rng.hpp"

namespace qsv::stats {

std::string_view to_string(BootstrapMode m) {
    return m == BootstrapMode::WithinSimulator ? "within_simulator" : "cross_simulator";
}

BootstrapMode parse_bootstrap_mode(std::string_view text) {
    if (text == "within_simulator") return BootstrapMode::WithinSimulator;
    if (text == "cross_simulator") return BootstrapMode::CrossSimulator;
    throw ConfigError("unknown bootstrap mode '" + std::string(text) + "' (expected within_simulator or cross_simulator)");
}

double nearest_rank_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (q <= 0.0) return sorted.front();
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::min(rank, sorted.size()) - 1];
}

namespace {

constexpr CorrelationMethod kMethods[] = {CorrelationMethod::Pearson, CorrelationMethod::Kendall};

// Upper-triangle coefficients of the matrix whose rows are `rows`.
std::vector<std::optional<double>> upper_triangle(const std::vector<const Series*>& rows, std::size_t k,
                                                  CorrelationMethod method) {
    std::vector<Series> columns(k, Series(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < k; ++c) columns[c][r] = (*rows[r])[c];
    }
    std::vector<std::optional<double>> out;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            out.push_back(method == CorrelationMethod::Pearson ? pearson(columns[i], columns[j]).value
                                                               : kendall_tau_b(columns[i], columns[j]).value);
        }
    }
    return out;
}

}  // namespace

BootstrapReport bootstrap_correlations(const BootstrapInput& input, std::size_t iterations, std::uint64_t seed,
                                       BootstrapMode mode) {
    if (iterations == 0) throw ConfigError("bootstrap iterations must be positive");
    const std::size_t k = input.measures.size();
    for (const auto& g : input.groups) {
        if (g.candidates.empty()) {
            throw DataError("bootstrap group " + g.simulator_id + "/" + g.session_id + " has no candidates");
        }
        for (const auto& c : g.candidates) {
            if (c.values.size() != k) throw DataError("bootstrap candidate has the wrong number of measure values");
        }
    }

    BootstrapReport report;
    report.iterations = iterations;
    report.seed = seed;
    report.mode = mode;
    report.rng_algorithm = kRngAlgorithm;

    // Draw pool per group: its own candidates, or every candidate sharing the session id.
    std::vector<std::vector<const Candidate*>> pools(input.groups.size());
    std::map<std::string, std::vector<const Candidate*>> by_session;
    if (mode == BootstrapMode::CrossSimulator) {
        for (const auto& g : input.groups) {
            for (const auto& c : g.candidates) by_session[g.session_id].push_back(&c);
        }
    }
    bool any_choice = false;
    for (std::size_t i = 0; i < input.groups.size(); ++i) {
        const auto& g = input.groups[i];
        if (mode == BootstrapMode::CrossSimulator) {
            pools[i] = by_session[g.session_id];
        } else {
            for (const auto& c : g.candidates) pools[i].push_back(&c);
        }
        any_choice = any_choice || pools[i].size() >= 2;
    }
    report.degenerate = !any_choice;
    if (report.degenerate) report.warnings.push_back("no topic has 2 or more candidates; all deviations are 0");

    std::vector<const Series*> baseline_rows;
    for (const auto& g : input.groups) baseline_rows.push_back(&g.candidates.front().values);

    const std::size_t n_pairs = k < 2 ? 0 : k * (k - 1) / 2;
    for (const auto method : kMethods) {
        const auto baseline = upper_triangle(baseline_rows, k, method);
        std::vector<std::vector<double>> deviations(n_pairs);
        for (std::size_t it = 0; it < iterations; ++it) {
            std::vector<double> current(n_pairs, 0.0);
            std::vector<bool> defined(n_pairs, true);
            if (!report.degenerate) {
                StreamRng rng(seed, it);
                std::vector<const Series*> rows;
                rows.reserve(pools.size());
                for (const auto& pool : pools) rows.push_back(&pool[rng.uniform_index(pool.size())]->values);
                const auto sample = upper_triangle(rows, k, method);
                for (std::size_t p = 0; p < n_pairs; ++p) {
                    defined[p] = sample[p] && baseline[p];
                    if (defined[p]) current[p] = std::abs(*sample[p] - *baseline[p]);
                }
            } else {
                for (std::size_t p = 0; p < n_pairs; ++p) defined[p] = baseline[p].has_value();
            }
            for (std::size_t p = 0; p < n_pairs; ++p) {
                if (defined[p]) deviations[p].push_back(current[p]);
            }
        }

        MethodDeviation md;
        md.method = method;
        std::size_t p = 0;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j, ++p) {
                auto& values = deviations[p];
                std::sort(values.begin(), values.end());
                PairDeviation pd{input.measures[i], input.measures[j], values.size(), 0.0, {}};
                for (const double q : kDeviationQuantiles) {
                    pd.quantiles.push_back(values.empty() ? 0.0 : nearest_rank_quantile(values, q));
                }
                if (!values.empty()) pd.max = values.back();
                md.max_abs_deviation = std::max(md.max_abs_deviation, pd.max);
                md.pairs.push_back(std::move(pd));
            }
        }
        report.methods.push_back(std::move(md));
    }
    return report;
}

}  // namespace qsv::stats
