#include "qsv/stats/mutual_information.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace qsv::stats {

int default_bin_count(std::size_t n) {
    const auto b = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    return std::max(b, 2);
}

std::vector<int> equal_frequency_bins(std::span<const double> values, int bins) {
    if (bins < 1) throw std::invalid_argument("bin count must be positive");
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<int> out(n);
    std::size_t first = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
        if (pos > 0 && values[order[pos]] != values[order[pos - 1]]) first = pos;
        const auto bin = static_cast<int>(first * static_cast<std::size_t>(bins) / n);
        out[order[pos]] = std::min(bin, bins - 1);
    }
    return out;
}

namespace {

// sum_c (c/n) * log(n/c). MI terms below use the same expression shape and
// summation order so that nmi(x, x) is exactly 1.
double entropy(const std::vector<std::size_t>& counts, double n) {
    std::vector<double> terms;
    for (const std::size_t c : counts) {
        if (c == 0) continue;
        const auto cd = static_cast<double>(c);
        terms.push_back((cd / n) * std::log((n * cd) / (cd * cd)));
    }
    std::sort(terms.begin(), terms.end());
    return std::accumulate(terms.begin(), terms.end(), 0.0);
}

}  // namespace

std::optional<double> nmi(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y,
                          int bins) {
    if (x.size() != y.size()) throw std::invalid_argument("series have different lengths");
    if (bins < 1) throw std::invalid_argument("bin count must be positive");
    std::vector<double> cx, cy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] && y[i] && std::isfinite(*x[i]) && std::isfinite(*y[i])) {
            cx.push_back(*x[i]);
            cy.push_back(*y[i]);
        }
    }
    const std::size_t n = cx.size();
    if (n == 0 || n < static_cast<std::size_t>(bins)) return std::nullopt;
    auto constant = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
    };
    if (constant(cx) || constant(cy)) return std::nullopt;

    const auto bx = equal_frequency_bins(cx, bins);
    const auto by = equal_frequency_bins(cy, bins);
    const auto nb = static_cast<std::size_t>(bins);
    std::vector<std::size_t> count_x(nb, 0), count_y(nb, 0), joint(nb * nb, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++count_x[static_cast<std::size_t>(bx[i])];
        ++count_y[static_cast<std::size_t>(by[i])];
        ++joint[static_cast<std::size_t>(bx[i]) * nb + static_cast<std::size_t>(by[i])];
    }

    const auto nd = static_cast<double>(n);
    const double hx = entropy(count_x, nd);
    const double hy = entropy(count_y, nd);
    if (hx == 0.0 || hy == 0.0) return 0.0;

    // Terms are summed in sorted order so swapping x and y is bit-exact.
    std::vector<double> terms;
    for (std::size_t a = 0; a < nb; ++a) {
        for (std::size_t b = 0; b < nb; ++b) {
            const std::size_t c = joint[a * nb + b];
            if (c == 0) continue;
            const auto cd = static_cast<double>(c);
            terms.push_back((cd / nd) *
                            std::log((nd * cd) / (static_cast<double>(count_x[a]) * static_cast<double>(count_y[b]))));
        }
    }
    std::sort(terms.begin(), terms.end());
    const double mi = std::accumulate(terms.begin(), terms.end(), 0.0);
    return std::clamp(mi / ((hx + hy) / 2.0), 0.0, 1.0);
}

std::optional<double> nmi(std::span<const double> x, std::span<const double> y, int bins) {
    const std::vector<std::optional<double>> lx(x.begin(), x.end());
    const std::vector<std::optional<double>> ly(y.begin(), y.end());
    return nmi(lx, ly, bins);
}

NmiReport nmi_matrix(const MeasureMatrix& m, std::optional<int> bins) {
    NmiReport report;
    report.names = m.column_names();
    report.bins = bins;
    const std::size_t k = m.cols();
    report.nmi.assign(k * k, std::nullopt);

    std::vector<Series> columns;
    for (std::size_t c = 0; c < k; ++c) columns.push_back(m.column(c));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            int b = 0;
            if (bins) {
                b = *bins;
            } else {
                std::size_t complete = 0;
                for (std::size_t r = 0; r < m.rows(); ++r) complete += columns[i][r] && columns[j][r];
                b = default_bin_count(complete);
            }
            report.nmi[i * k + j] = report.nmi[j * k + i] = nmi(columns[i], columns[j], b);
        }
    }
    return report;
}

std::vector<FlaggedPair> flag_nonlinear(const CorrelationMatrix& pearson, const CorrelationMatrix& kendall,
                                        const NmiReport& nmi, const NonlinearThresholds& thresholds) {
    if (pearson.names != nmi.names || kendall.names != nmi.names) {
        throw std::invalid_argument("flag_nonlinear: matrices must share column names");
    }
    std::vector<FlaggedPair> flagged;
    const std::size_t k = nmi.names.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const auto v = nmi.at(i, j);
            const auto p = pearson.at(i, j);
            const auto t = kendall.at(i, j);
            if (!v || !p || !t) continue;
            if (*v >= thresholds.nmi && std::abs(*p) < thresholds.linear && std::abs(*t) < thresholds.linear) {
                flagged.push_back({nmi.names[i], nmi.names[j], *v, *p, *t});
            }
        }
    }
    std::stable_sort(flagged.begin(), flagged.end(), [](const FlaggedPair& a, const FlaggedPair& b) { return a.nmi > b.nmi; });
    return flagged;
}

}  // namespace qsv::stats
