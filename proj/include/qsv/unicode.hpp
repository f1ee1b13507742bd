#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace qsv::unicode {

/// NFC-normalizes UTF-8 text. Throws DataError on invalid UTF-8.
std::string nfc(std::string_view utf8);

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t scalar_count(std::string_view utf8);

}  // namespace qsv::unicode
