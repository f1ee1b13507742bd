#include "qsv/serp.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "qsv/errors.hpp"

namespace qsv {

std::string_view to_string(RboVariant v) { return v == RboVariant::Base ? "base" : "extrapolated"; }

RboVariant parse_rbo_variant(std::string_view text) {
    if (text == "base") return RboVariant::Base;
    if (text == "extrapolated") return RboVariant::Extrapolated;
    throw ConfigError("unknown RBO variant '" + std::string(text) + "'");
}

void validate(const RboParams& params) {
    if (!(params.p > 0.0 && params.p < 1.0)) throw ConfigError("RBO persistence p must lie in (0, 1)");
    if (params.depth < 1) throw ConfigError("RBO depth must be >= 1");
}

std::optional<double> serp_jaccard(const RankedList& a, const RankedList& b, std::optional<std::size_t> cutoff) {
    const std::size_t na = cutoff ? std::min(*cutoff, a.doc_ids.size()) : a.doc_ids.size();
    const std::size_t nb = cutoff ? std::min(*cutoff, b.doc_ids.size()) : b.doc_ids.size();
    const std::set<std::string_view> sa(a.doc_ids.begin(), a.doc_ids.begin() + static_cast<std::ptrdiff_t>(na));
    const std::set<std::string_view> sb(b.doc_ids.begin(), b.doc_ids.begin() + static_cast<std::ptrdiff_t>(nb));
    if (sa.empty() && sb.empty()) return std::nullopt;
    std::size_t common = 0;
    for (const auto& d : sa) common += sb.count(d);
    return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

std::optional<double> rbo(const RankedList& a, const RankedList& b, const RboParams& params) {
    validate(params);
    if (a.doc_ids.empty() && b.doc_ids.empty()) return std::nullopt;
    const std::size_t k = std::min({params.depth, a.doc_ids.size(), b.doc_ids.size()});
    if (k == 0) return 0.0;

    // Overlap X_d grows by one whenever an element is seen in both prefixes.
    const double p = params.p;
    std::unordered_set<std::string_view> unmatched;
    std::size_t overlap = 0;
    double weight = 1.0;  // p^(d-1)
    double series = 0.0;  // sum_d p^(d-1) * X_d / d
    bool agree = true;    // X_d == d at every depth so far
    for (std::size_t d = 1; d <= k; ++d) {
        const std::string_view x = a.doc_ids[d - 1];
        const std::string_view y = b.doc_ids[d - 1];
        if (x == y) {
            ++overlap;
        } else {
            if (unmatched.erase(x)) ++overlap; else unmatched.insert(x);
            if (unmatched.erase(y)) ++overlap; else unmatched.insert(y);
        }
        agree = agree && overlap == d;
        series += weight * static_cast<double>(overlap) / static_cast<double>(d);
        weight *= p;
    }
    // weight == p^k here.
    const double base = (1.0 - p) * series;
    if (params.variant == RboVariant::Base) return base;
    // Full agreement telescopes to exactly 1; summation would round.
    if (agree) return 1.0;
    return static_cast<double>(overlap) / static_cast<double>(k) * weight + base;
}

}  // namespace qsv
