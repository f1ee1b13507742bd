#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qsv {

/// topic -> doc -> grade (>= 0).
using Qrels = std::map<std::string, std::map<std::string, int>, std::less<>>;

struct RankedList {
    std::string topic_id;
    std::vector<std::string> doc_ids;
};

/// Builds a RankedList, rejecting duplicate doc ids with DataError.
RankedList make_ranked_list(std::string topic_id, std::vector<std::string> doc_ids);

/// TREC qrels: `topic iteration doc grade` per line. Negative grades are
/// clamped to 0 and reported through `warnings` when given.
Qrels parse_qrels(std::istream& in, std::vector<std::string>* warnings = nullptr);
Qrels load_qrels(const std::string& path, std::vector<std::string>* warnings = nullptr);

// Binary relevance is grade >= 1. Unjudged documents count as non-relevant.
// A topic absent from the qrels yields nullopt for every metric.

std::optional<double> precision_at_k(const RankedList& r, const Qrels& q, std::size_t k);
/// nullopt when the topic has no relevant document.
std::optional<double> recall_at_k(const RankedList& r, const Qrels& q, std::size_t k);
std::optional<double> reciprocal_rank(const RankedList& r, const Qrels& q);
/// Divides by the total number of relevant documents in the qrels.
std::optional<double> average_precision(const RankedList& r, const Qrels& q);
/// Linear gain, log2(rank + 1) discount; nullopt without a positive grade.
std::optional<double> ndcg_at_k(const RankedList& r, const Qrels& q, std::size_t k);

}  // namespace qsv
