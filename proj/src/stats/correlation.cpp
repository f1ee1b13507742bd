#include "qsv/stats/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace qsv::stats {

std::string_view to_string(CorrelationMethod m) { return m == CorrelationMethod::Pearson ? "pearson" : "kendall"; }

namespace {

struct Complete {
    std::vector<double> x;
    std::vector<double> y;
};

Complete complete_pairs(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y) {
    if (x.size() != y.size()) throw std::invalid_argument("series have different lengths");
    Complete c;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] && y[i] && std::isfinite(*x[i]) && std::isfinite(*y[i])) {
            c.x.push_back(*x[i]);
            c.y.push_back(*y[i]);
        }
    }
    return c;
}

std::vector<std::optional<double>> lift(std::span<const double> v) { return {v.begin(), v.end()}; }

bool is_constant(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

Coefficient undefined(std::size_t n, std::string reason) { return {std::nullopt, n, std::move(reason)}; }

Coefficient pearson_complete(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 3) return undefined(n, "fewer than 3 complete observations");
    if (is_constant(x) || is_constant(y)) return undefined(n, "constant series");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return undefined(n, "constant series");
    return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), n, {}};
}

// Tied pairs within runs of equal values of an ascending-sorted sequence.
template <typename Eq>
std::int64_t tied_pairs(std::size_t n, Eq equal) {
    std::int64_t ties = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && equal(i - 1, i)) {
            ++run;
        } else {
            ties += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
            run = 1;
        }
    }
    return ties;
}

// Sorts v ascending and returns the number of inversions.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += static_cast<std::int64_t>(mid - i);
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

// Knight's algorithm.
Coefficient kendall_complete(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 3) return undefined(n, "fewer than 3 complete observations");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[order[i]];
        ys[i] = y[order[i]];
    }

    const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const std::int64_t tx = tied_pairs(n, [&](std::size_t a, std::size_t b) { return xs[a] == xs[b]; });
    const std::int64_t txy =
        tied_pairs(n, [&](std::size_t a, std::size_t b) { return xs[a] == xs[b] && ys[a] == ys[b]; });

    std::vector<double> buf(n);
    const std::int64_t swaps = merge_count(ys, buf, 0, n);
    const std::int64_t ty = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

    if (n0 - tx == 0 || n0 - ty == 0) return undefined(n, "constant series");
    const std::int64_t concordant_minus_discordant = n0 - tx - ty + txy - 2 * swaps;
    const double tau = static_cast<double>(concordant_minus_discordant) /
                       std::sqrt(static_cast<double>(n0 - tx) * static_cast<double>(n0 - ty));
    return {tau, n, {}};
}

}  // namespace

Coefficient pearson(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y) {
    const auto c = complete_pairs(x, y);
    return pearson_complete(c.x, c.y);
}

Coefficient pearson(std::span<const double> x, std::span<const double> y) {
    const auto lx = lift(x);
    const auto ly = lift(y);
    return pearson(lx, ly);
}

Coefficient kendall_tau_b(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y) {
    const auto c = complete_pairs(x, y);
    return kendall_complete(c.x, c.y);
}

Coefficient kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    const auto lx = lift(x);
    const auto ly = lift(y);
    return kendall_tau_b(lx, ly);
}

std::optional<std::size_t> CorrelationMatrix::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    return std::nullopt;
}

CorrelationMatrix correlation_matrix(const MeasureMatrix& m, CorrelationMethod method) {
    CorrelationMatrix out;
    out.method = method;
    out.names = m.column_names();
    const std::size_t k = m.cols();
    out.values.assign(k * k, std::nullopt);
    out.pair_counts.assign(k * k, 0);

    std::vector<Series> columns;
    for (std::size_t c = 0; c < k; ++c) columns.push_back(m.column(c));

    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            const Coefficient c = method == CorrelationMethod::Pearson ? pearson(columns[i], columns[j])
                                                                       : kendall_tau_b(columns[i], columns[j]);
            auto value = c.value;
            if (i == j && value) value = 1.0;
            out.values[i * k + j] = out.values[j * k + i] = value;
            out.pair_counts[i * k + j] = out.pair_counts[j * k + i] = c.n;
        }
    }
    return out;
}

}  // namespace qsv::stats
