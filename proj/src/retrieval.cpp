#include "qsv/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "qsv/errors.hpp"

namespace qsv {

RankedList make_ranked_list(std::string topic_id, std::vector<std::string> doc_ids) {
    std::set<std::string_view> seen;
    for (const auto& d : doc_ids) {
        if (!seen.insert(d).second) throw DataError("duplicate in SERP: '" + d + "'");
    }
    return {std::move(topic_id), std::move(doc_ids)};
}

Qrels parse_qrels(std::istream& in, std::vector<std::string>* warnings) {
    Qrels qrels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream fields(line);
        std::vector<std::string> cols;
        for (std::string f; fields >> f;) cols.push_back(f);
        if (cols.empty()) continue;
        const std::string where = "qrels line " + std::to_string(lineno);
        if (cols.size() != 4) throw DataError(where + ": expected 4 columns, got " + std::to_string(cols.size()));

        int grade = 0;
        const auto& g = cols[3];
        const auto r = std::from_chars(g.data(), g.data() + g.size(), grade);
        if (r.ec != std::errc{} || r.ptr != g.data() + g.size()) {
            throw DataError(where + ": grade '" + g + "' is not an integer");
        }
        if (grade < 0) {
            if (warnings) warnings->push_back(where + ": negative grade " + g + " clamped to 0");
            grade = 0;
        }
        auto& docs = qrels[cols[0]];
        const auto [it, inserted] = docs.emplace(cols[2], grade);
        if (!inserted && it->second != grade) {
            throw DataError(where + ": conflicting grades for (" + cols[0] + ", " + cols[2] + ")");
        }
    }
    return qrels;
}

Qrels load_qrels(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open qrels file: " + path);
    try {
        return parse_qrels(in, warnings);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

namespace {

const std::map<std::string, int>* judgments(const RankedList& r, const Qrels& q) {
    const auto it = q.find(r.topic_id);
    return it == q.end() ? nullptr : &it->second;
}

int grade_of(const std::map<std::string, int>& docs, const std::string& doc) {
    const auto it = docs.find(doc);
    return it == docs.end() ? 0 : it->second;
}

std::size_t relevant_total(const std::map<std::string, int>& docs) {
    return static_cast<std::size_t>(std::count_if(docs.begin(), docs.end(), [](const auto& d) { return d.second >= 1; }));
}

std::size_t relevant_in_top(const RankedList& r, const std::map<std::string, int>& docs, std::size_t k) {
    std::size_t hits = 0;
    const std::size_t n = std::min(k, r.doc_ids.size());
    for (std::size_t i = 0; i < n; ++i) hits += grade_of(docs, r.doc_ids[i]) >= 1;
    return hits;
}

}  // namespace

std::optional<double> precision_at_k(const RankedList& r, const Qrels& q, std::size_t k) {
    if (k == 0) throw std::invalid_argument("precision_at_k: k must be >= 1");
    const auto* docs = judgments(r, q);
    if (!docs) return std::nullopt;
    return static_cast<double>(relevant_in_top(r, *docs, k)) / static_cast<double>(k);
}

std::optional<double> recall_at_k(const RankedList& r, const Qrels& q, std::size_t k) {
    if (k == 0) throw std::invalid_argument("recall_at_k: k must be >= 1");
    const auto* docs = judgments(r, q);
    if (!docs) return std::nullopt;
    const std::size_t total = relevant_total(*docs);
    if (total == 0) return std::nullopt;
    return static_cast<double>(relevant_in_top(r, *docs, k)) / static_cast<double>(total);
}

std::optional<double> reciprocal_rank(const RankedList& r, const Qrels& q) {
    const auto* docs = judgments(r, q);
    if (!docs) return std::nullopt;
    for (std::size_t i = 0; i < r.doc_ids.size(); ++i) {
        if (grade_of(*docs, r.doc_ids[i]) >= 1) return 1.0 / static_cast<double>(i + 1);
    }
    return 0.0;
}

std::optional<double> average_precision(const RankedList& r, const Qrels& q) {
    const auto* docs = judgments(r, q);
    if (!docs) return std::nullopt;
    const std::size_t total = relevant_total(*docs);
    if (total == 0) return std::nullopt;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < r.doc_ids.size(); ++i) {
        if (grade_of(*docs, r.doc_ids[i]) >= 1) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total);
}

std::optional<double> ndcg_at_k(const RankedList& r, const Qrels& q, std::size_t k) {
    if (k == 0) throw std::invalid_argument("ndcg_at_k: k must be >= 1");
    const auto* docs = judgments(r, q);
    if (!docs) return std::nullopt;

    std::vector<int> ideal;
    for (const auto& [doc, grade] : *docs) {
        if (grade > 0) ideal.push_back(grade);
    }
    if (ideal.empty()) return std::nullopt;
    std::sort(ideal.begin(), ideal.end(), std::greater<>());

    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, r.doc_ids.size()); ++i) {
        dcg += grade_of(*docs, r.doc_ids[i]) / std::log2(static_cast<double>(i + 2));
    }
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
        idcg += ideal[i] / std::log2(static_cast<double>(i + 2));
    }
    return dcg / idcg;
}

}  // namespace qsv
