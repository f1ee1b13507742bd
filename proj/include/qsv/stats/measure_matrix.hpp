#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace qsv::stats {

using Series = std::vector<std::optional<double>>;

struct RowKey {
    std::string simulator_id;
    std::string session_id;
    std::int64_t rank = 1;

    bool operator==(const RowKey&) const = default;
};

/// Rows are session pairs, columns are measures. Missing cells are nullopt.
class MeasureMatrix {
public:
    MeasureMatrix() = default;
    /// Throws std::invalid_argument on duplicate column names.
    explicit MeasureMatrix(std::vector<std::string> column_names);

    /// values.size() must equal cols().
    void add_row(RowKey key, Series values);

    std::size_t rows() const { return keys_.size(); }
    std::size_t cols() const { return names_.size(); }

    std::optional<double> at(std::size_t row, std::size_t col) const { return cells_[row * cols() + col]; }
    Series column(std::size_t col) const;
    Series row(std::size_t row) const;

    const std::vector<std::string>& column_names() const { return names_; }
    const std::vector<RowKey>& row_keys() const { return keys_; }
    std::optional<std::size_t> column_index(const std::string& name) const;

    bool operator==(const MeasureMatrix&) const = default;

private:
    std::vector<std::string> names_;
    std::vector<RowKey> keys_;
    std::vector<std::optional<double>> cells_;
};

/// CSV with a `simulator_id,session_id,rank,<measures...>` header; missing
/// cells are empty. Lines starting with '#' are comments.
std::string to_csv(const MeasureMatrix& m, const std::string& comment = {});
/// Throws DataError with a line number on malformed input.
MeasureMatrix matrix_from_csv(std::istream& in);
MeasureMatrix load_matrix_csv(const std::string& path);

}  // namespace qsv::stats
