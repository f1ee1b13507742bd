#include "qsv/pipeline/report.hpp"

#include "qsv/errors.hpp"
#include "qsv/pipeline/outputs.hpp"
#include "qsv/pipeline/resampling.hpp"

namespace qsv::pipeline {

ReportRun run_report(const RunConfig& config, const std::filesystem::path& out_dir) {
    if (config.bootstrap.iterations == 0) throw ConfigError("bootstrap iterations must be positive");
    const auto measures = enabled_measures(config);
    const auto inputs = load_inputs(config, measures);
    const std::string digest = config_digest(config);

    ReportRun report{compute_measures(config, inputs, measures, config.pairing), {}, {}};
    write_file_atomic(out_dir / "measures.jsonl", measures_jsonl(report.measures, config, digest));
    write_file_atomic(out_dir / "measures.csv", stats::to_csv(report.measures.matrix, provenance_line(digest)));

    report.analysis = run_analysis({{"measures", report.measures.matrix}}, config, out_dir);
    report.bootstrap = run_bootstrap(config, inputs, out_dir);
    return report;
}

}  // namespace qsv::pipeline
