#include "qsv/stats/measure_matrix.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qsv/errors.hpp"
#include "qsv/format.hpp"

namespace qsv::stats {

MeasureMatrix::MeasureMatrix(std::vector<std::string> column_names) : names_(std::move(column_names)) {
    std::set<std::string_view> seen;
    for (const auto& n : names_) {
        if (!seen.insert(n).second) throw std::invalid_argument("duplicate measure column '" + n + "'");
    }
}

void MeasureMatrix::add_row(RowKey key, Series values) {
    if (values.size() != cols()) {
        throw std::invalid_argument("row has " + std::to_string(values.size()) + " values, matrix has " +
                                    std::to_string(cols()) + " columns");
    }
    keys_.push_back(std::move(key));
    cells_.insert(cells_.end(), values.begin(), values.end());
}

Series MeasureMatrix::column(std::size_t col) const {
    Series out;
    out.reserve(rows());
    for (std::size_t r = 0; r < rows(); ++r) out.push_back(at(r, col));
    return out;
}

Series MeasureMatrix::row(std::size_t r) const {
    return {cells_.begin() + static_cast<std::ptrdiff_t>(r * cols()),
            cells_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols())};
}

std::optional<std::size_t> MeasureMatrix::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    return std::nullopt;
}

std::string to_csv(const MeasureMatrix& m, const std::string& comment) {
    std::string out;
    if (!comment.empty()) out += "# " + comment + "\n";
    out += "simulator_id,session_id,rank";
    for (const auto& n : m.column_names()) out += "," + n;
    out += "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto& key = m.row_keys()[r];
        out += key.simulator_id + "," + key.session_id + "," + std::to_string(key.rank);
        for (std::size_t c = 0; c < m.cols(); ++c) out += "," + format_cell(m.at(r, c));
        out += "\n";
    }
    return out;
}

MeasureMatrix matrix_from_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<MeasureMatrix> matrix;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r" || line.front() == '#') continue;
        const std::string where = "matrix CSV line " + std::to_string(lineno) + ": ";
        std::vector<std::string> fields;
        try {
            fields = split_csv_line(line);
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        }
        if (!matrix) {
            if (fields.size() < 3 || fields[0] != "simulator_id" || fields[1] != "session_id" || fields[2] != "rank") {
                throw DataError(where + "header must start with simulator_id,session_id,rank");
            }
            try {
                matrix.emplace(std::vector<std::string>(fields.begin() + 3, fields.end()));
            } catch (const std::invalid_argument& e) {
                throw DataError(where + e.what());
            }
            continue;
        }
        if (fields.size() != matrix->cols() + 3) {
            throw DataError(where + "expected " + std::to_string(matrix->cols() + 3) + " fields, got " +
                            std::to_string(fields.size()));
        }
        RowKey key{fields[0], fields[1], 0};
        const auto& rank = fields[2];
        const auto r = std::from_chars(rank.data(), rank.data() + rank.size(), key.rank);
        if (r.ec != std::errc{} || r.ptr != rank.data() + rank.size()) throw DataError(where + "bad rank '" + rank + "'");
        Series values;
        for (std::size_t c = 3; c < fields.size(); ++c) {
            if (fields[c].empty()) {
                values.emplace_back();
                continue;
            }
            try {
                values.emplace_back(parse_double(fields[c]));
            } catch (const DataError& e) {
                throw DataError(where + e.what());
            }
        }
        matrix->add_row(std::move(key), std::move(values));
    }
    if (!matrix) throw DataError("matrix CSV has no header");
    return *matrix;
}

MeasureMatrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open matrix CSV: " + path);
    try {
        return matrix_from_csv(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace qsv::stats
