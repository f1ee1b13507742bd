#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qsv {

/// Shortest decimal that round-trips to the same double. Non-finite values
/// are rendered as "nan", "inf" or "-inf".
std::string format_double(double value);

/// Empty string for a missing value.
std::string format_cell(const std::optional<double>& value);

/// Parses a double written by format_double; throws DataError otherwise.
double parse_double(std::string_view text);

/// Splits one CSV record. Quoted fields are not produced by this toolkit and
/// are rejected.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace qsv
