#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsv/stats/correlation.hpp"
#include "qsv/stats/factor_analysis.hpp"
#include "qsv/stats/mutual_information.hpp"

namespace qsv::pipeline {

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// "qsv <version> config=<digest>", embedded in every output file.
std::string provenance_line(const std::string& config_digest);

/// Starts a JSON report with toolkit, version and config digest fields.
nlohmann::ordered_json report_header(const std::string& config_digest);

/// Square matrix with a header row and a leading column of names. Missing
/// cells are empty.
std::string square_csv(const std::vector<std::string>& names, const std::vector<std::optional<double>>& values,
                       const std::string& comment);

std::string loadings_csv(const stats::FactorSolution& solution, const std::string& comment);

/// Cells colored on a symmetric [-1, 1] scale, labeled with the same text
/// square_csv writes.
std::string heatmap_svg(const stats::CorrelationMatrix& m, const std::string& comment);

nlohmann::ordered_json optional_number(const std::optional<double>& v);

}  // namespace qsv::pipeline
