#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qsv/text_measures.hpp"
#include "qsv/wordnet.hpp"

namespace qsv {

/// Token-set Jaccard; nullopt when either side has no tokens.
std::optional<double> jaccard_similarity(const TokenizedQuery& a, const TokenizedQuery& b);
std::optional<double> jaccard_similarity(const std::vector<std::string>& a,
                                         const std::vector<std::string>& b);

/// nullopt for a zero vector; throws DataError on dimension mismatch.
std::optional<double> cosine_similarity(std::span<const double> a, std::span<const double> b);

struct BertScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Greedy-matching BERTScore without IDF weighting or baseline rescaling.
/// Rows are unit-normalized here. Precision is taken over the simulated
/// rows, recall over the real rows. nullopt for an empty matrix or a zero
/// row; throws DataError on dimension mismatch.
std::optional<BertScore> bert_score(const std::vector<std::vector<double>>& real_rows,
                                    const std::vector<std::vector<double>>& simulated_rows);

/// Term-level Wu-Palmer similarity averaged in both directions.
std::optional<double> wordnet_similarity(const TokenizedQuery& a, const TokenizedQuery& b,
                                         const wordnet::SynsetGraph& graph);

}  // namespace qsv
