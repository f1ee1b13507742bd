#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qsv/pipeline/config.hpp"
#include "qsv/pipeline/measures.hpp"
#include "qsv/stats/bootstrap.hpp"

namespace qsv::pipeline {

/// Groups one-to-many rows by (simulator, session). Rows must be in pairing
/// order so that the first row of each group is the top-ranked candidate.
stats::BootstrapInput bootstrap_input(const MeasureRun& one_to_many);

std::string bootstrap_json(const std::vector<stats::BootstrapReport>& reports, const std::vector<std::string>& measures,
                           const std::string& digest);

/// One report per configured mode, written to out_dir/bootstrap.json.
std::vector<stats::BootstrapReport> run_bootstrap(const RunConfig& config, const MeasureInputs& inputs,
                                                  const std::filesystem::path& out_dir);
std::vector<stats::BootstrapReport> run_bootstrap(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace qsv::pipeline
