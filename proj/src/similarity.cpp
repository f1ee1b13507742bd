#include "qsv/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qsv/errors.hpp"

namespace qsv {

std::optional<double> jaccard_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::set<std::string_view> sa(a.begin(), a.end());
    const std::set<std::string_view> sb(b.begin(), b.end());
    if (sa.empty() || sb.empty()) return std::nullopt;
    std::size_t common = 0;
    for (const auto& t : sa) common += sb.count(t);
    const std::size_t united = sa.size() + sb.size() - common;
    return static_cast<double>(common) / static_cast<double>(united);
}

std::optional<double> jaccard_similarity(const TokenizedQuery& a, const TokenizedQuery& b) {
    return jaccard_similarity(a.tokens, b.tokens);
}

std::optional<double> cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DataError("cosine_similarity: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return std::nullopt;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

namespace {

std::optional<std::vector<std::vector<double>>> unit_rows(const std::vector<std::vector<double>>& rows,
                                                          std::size_t dim) {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != dim) throw DataError("bert_score: dimension mismatch");
        double norm = 0.0;
        for (const double v : row) norm += v * v;
        if (norm == 0.0) return std::nullopt;
        norm = std::sqrt(norm);
        auto& u = out.emplace_back(row);
        for (double& v : u) v /= norm;
    }
    return out;
}

}  // namespace

std::optional<BertScore> bert_score(const std::vector<std::vector<double>>& real_rows,
                                    const std::vector<std::vector<double>>& simulated_rows) {
    if (real_rows.empty() || simulated_rows.empty()) return std::nullopt;
    const std::size_t dim = real_rows.front().size();
    const auto er = unit_rows(real_rows, dim);
    const auto es = unit_rows(simulated_rows, dim);
    if (!er || !es) return std::nullopt;

    const std::size_t ns = es->size();
    const std::size_t nr = er->size();
    std::vector<double> best_for_sim(ns, -1.0);
    std::vector<double> best_for_real(nr, -1.0);
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nr; ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) s += (*es)[i][d] * (*er)[j][d];
            s = std::clamp(s, -1.0, 1.0);
            best_for_sim[i] = std::max(best_for_sim[i], s);
            best_for_real[j] = std::max(best_for_real[j], s);
        }
    }
    BertScore out;
    for (const double v : best_for_sim) out.precision += v;
    for (const double v : best_for_real) out.recall += v;
    out.precision /= static_cast<double>(ns);
    out.recall /= static_cast<double>(nr);
    const double sum = out.precision + out.recall;
    out.f1 = sum == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / sum;
    return out;
}

namespace {

struct TermSenses {
    const std::string* term;
    const std::vector<wordnet::SynsetKey>* nouns;
    const std::vector<wordnet::SynsetKey>* verbs;

    bool has_senses() const { return !nouns->empty() || !verbs->empty(); }
};

double term_similarity(const TermSenses& a, const TermSenses& b, const wordnet::SynsetGraph& g) {
    if (*a.term == *b.term) return 1.0;
    double best = 0.0;
    auto scan = [&](const std::vector<wordnet::SynsetKey>& xs, const std::vector<wordnet::SynsetKey>& ys) {
        for (const auto x : xs) {
            for (const auto y : ys) best = std::max(best, wordnet::wu_palmer(g, x, y));
        }
    };
    scan(*a.nouns, *b.nouns);
    scan(*a.verbs, *b.verbs);
    return best;
}

// Mean over scoreable terms of `from` of the best match in `to`; nullopt
// when no term of `from` is scoreable.
std::optional<double> directed(const std::vector<TermSenses>& from, const std::vector<TermSenses>& to,
                               const wordnet::SynsetGraph& g) {
    double sum = 0.0;
    std::size_t included = 0;
    for (const auto& a : from) {
        const bool exact = std::any_of(to.begin(), to.end(), [&](const TermSenses& b) { return *a.term == *b.term; });
        if (!a.has_senses() && !exact) continue;
        double best = 0.0;
        for (const auto& b : to) best = std::max(best, term_similarity(a, b, g));
        sum += best;
        ++included;
    }
    if (included == 0) return std::nullopt;
    return sum / static_cast<double>(included);
}

std::vector<TermSenses> senses_of(const TokenizedQuery& q, const wordnet::SynsetGraph& g) {
    std::vector<TermSenses> out;
    for (const auto& t : q.tokens) {
        out.push_back({&t, &g.lookup(wordnet::Pos::Noun, t), &g.lookup(wordnet::Pos::Verb, t)});
    }
    return out;
}

}  // namespace

std::optional<double> wordnet_similarity(const TokenizedQuery& a, const TokenizedQuery& b,
                                         const wordnet::SynsetGraph& graph) {
    const auto sa = senses_of(a, graph);
    const auto sb = senses_of(b, graph);
    const auto ab = directed(sa, sb, graph);
    const auto ba = directed(sb, sa, graph);
    if (!ab && !ba) return std::nullopt;
    // A side with no scoreable term contributes zero evidence.
    return (ab.value_or(0.0) + ba.value_or(0.0)) / 2.0;
}

}  // namespace qsv
