#include "qsv/text_measures.hpp"

#include <set>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "qsv/errors.hpp"
#include "qsv/unicode.hpp"

namespace qsv {

namespace {

std::vector<UChar32> decode(std::string_view utf8) {
    std::vector<UChar32> out;
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const auto length = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) throw DataError("invalid UTF-8 in query");
        out.push_back(c);
    }
    return out;
}

void append_utf8(std::string& out, UChar32 c) {
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, c, error);
    if (error) throw DataError("code point cannot be encoded as UTF-8");
    out.append(buf, static_cast<std::size_t>(len));
}

bool is_terminator(UChar32 c) { return c == '.' || c == '!' || c == '?'; }

// Whitespace-separated words with leading and trailing punctuation removed.
// Pure-punctuation words are dropped. Case is preserved.
struct Word {
    std::vector<UChar32> chars;
    bool ends_sentence = false;
};

std::vector<Word> split_words(const std::vector<UChar32>& text) {
    std::vector<Word> words;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && u_isUWhiteSpace(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !u_isUWhiteSpace(text[i])) ++i;
        std::size_t b = start;
        std::size_t e = i;
        while (b < e && u_ispunct(text[b])) ++b;
        while (e > b && u_ispunct(text[e - 1])) --e;
        bool terminal = false;
        for (std::size_t k = (b < e ? e : start); k < i; ++k) terminal = terminal || is_terminator(text[k]);
        if (b < e) {
            words.push_back({{text.begin() + static_cast<std::ptrdiff_t>(b), text.begin() + static_cast<std::ptrdiff_t>(e)}, terminal});
        } else if (terminal && !words.empty()) {
            words.back().ends_sentence = true;
        }
    }
    return words;
}

bool is_vowel(char c) {
    switch (c) {
        case 'a': case 'e': case 'i': case 'o': case 'u': case 'y': return true;
        default: return false;
    }
}

}  // namespace

int count_syllables(std::string_view token) {
    int groups = 0;
    bool in_group = false;
    for (const char c : token) {
        const bool v = is_vowel(c);
        if (v && !in_group) ++groups;
        in_group = v;
    }
    if (groups > 1 && !token.empty() && token.back() == 'e') --groups;
    return groups < 1 ? 1 : groups;
}

TokenizedQuery tokenize(std::string_view raw) {
    TokenizedQuery q;
    q.raw = unicode::nfc(raw);
    const auto text = decode(q.raw);

    for (const Word& w : split_words(text)) {
        std::string token;
        for (const UChar32 c : w.chars) append_utf8(token, u_tolower(c));
        q.syllable_counts.push_back(count_syllables(token));
        q.tokens.push_back(std::move(token));
    }
    if (q.tokens.empty()) throw EmptyQueryError();

    // A run of terminators ("...", "?!") ends one sentence.
    int terminators = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (is_terminator(text[i]) && (i == 0 || !is_terminator(text[i - 1]))) ++terminators;
    }
    q.sentence_count = terminators > 1 ? terminators : 1;
    return q;
}

std::size_t query_length_chars(const TokenizedQuery& q) { return unicode::scalar_count(q.raw); }

std::size_t query_length_terms(const TokenizedQuery& q) { return q.tokens.size(); }

std::size_t unique_term_count(const TokenizedQuery& q) {
    return std::set<std::string_view>(q.tokens.begin(), q.tokens.end()).size();
}

double type_token_ratio(const TokenizedQuery& q) {
    return static_cast<double>(unique_term_count(q)) / static_cast<double>(query_length_terms(q));
}

double flesch_kincaid_grade(std::size_t words, std::size_t sentences, std::size_t syllables) {
    const auto w = static_cast<double>(words);
    return 0.39 * (w / static_cast<double>(sentences)) + 11.8 * (static_cast<double>(syllables) / w) - 15.59;
}

double flesch_kincaid_grade(const TokenizedQuery& q) {
    std::size_t syllables = 0;
    for (const int s : q.syllable_counts) syllables += static_cast<std::size_t>(s);
    return flesch_kincaid_grade(q.tokens.size(), static_cast<std::size_t>(q.sentence_count), syllables);
}

std::size_t named_entity_count(const TokenizedQuery& q, const std::optional<std::vector<std::string>>& annotations) {
    if (annotations) return annotations->size();

    const auto words = split_words(decode(q.raw));
    std::size_t entities = 0;
    std::size_t run = 0;
    bool run_starts_sentence = false;
    bool sentence_start = true;
    auto close_run = [&] {
        if (run > 1 || (run == 1 && !run_starts_sentence)) ++entities;
        run = 0;
    };
    for (const Word& w : words) {
        const bool capitalized = u_isupper(w.chars.front()) || u_istitle(w.chars.front());
        if (capitalized) {
            if (run == 0) run_starts_sentence = sentence_start;
            ++run;
        } else {
            close_run();
        }
        sentence_start = w.ends_sentence;
        if (w.ends_sentence) close_run();
    }
    close_run();
    return entities;
}

}  // namespace qsv
