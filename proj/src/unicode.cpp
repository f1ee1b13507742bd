#include "qsv/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "qsv/errors.hpp"

namespace qsv::unicode {

std::string nfc(std::string_view utf8) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw DataError("ICU NFC normalizer unavailable");

    // ICU substitutes U+FFFD for ill-formed input, so validate first.
    (void)scalar_count(utf8);
    const icu::UnicodeString text =
        icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    if (normalizer->isNormalized(text, status) && U_SUCCESS(status)) return std::string(utf8);
    status = U_ZERO_ERROR;
    const icu::UnicodeString normalized = normalizer->normalize(text, status);
    if (U_FAILURE(status)) throw DataError("NFC normalization failed");
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

std::size_t scalar_count(std::string_view utf8) {
    std::size_t count = 0;
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const auto length = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) throw DataError("invalid UTF-8 in text");
        ++count;
    }
    return count;
}

}  // namespace qsv::unicode
