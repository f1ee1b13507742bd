#pragma once

#include <filesystem>
#include <vector>

#include "qsv/pipeline/analysis.hpp"
#include "qsv/pipeline/config.hpp"
#include "qsv/pipeline/measures.hpp"
#include "qsv/stats/bootstrap.hpp"

namespace qsv::pipeline {

struct ReportRun {
    MeasureRun measures;
    AnalysisBundle analysis;
    std::vector<stats::BootstrapReport> bootstrap;
};

/// measure, analyze and bootstrap into one directory, reading inputs once.
ReportRun run_report(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace qsv::pipeline
