#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qsv {

struct TokenizedQuery {
    /// NFC-normalized input text.
    std::string raw;
    /// Lowercased terms with surrounding punctuation stripped.
    std::vector<std::string> tokens;
    int sentence_count = 1;
    std::vector<int> syllable_counts;
};

/// Throws EmptyQueryError when no term survives tokenization.
TokenizedQuery tokenize(std::string_view raw);

/// Vowel-group heuristic; always >= 1.
int count_syllables(std::string_view token);

std::size_t query_length_chars(const TokenizedQuery& q);
std::size_t query_length_terms(const TokenizedQuery& q);
std::size_t unique_term_count(const TokenizedQuery& q);
double type_token_ratio(const TokenizedQuery& q);

/// Flesch-Kincaid grade level from raw counts.
double flesch_kincaid_grade(std::size_t words, std::size_t sentences, std::size_t syllables);
double flesch_kincaid_grade(const TokenizedQuery& q);

/// Pass-through count when annotations are given; otherwise counts runs of
/// capitalized words, ignoring a lone capitalized sentence-initial word.
std::size_t named_entity_count(const TokenizedQuery& q,
                               const std::optional<std::vector<std::string>>& annotations = std::nullopt);

}  // namespace qsv
