#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qsv/embedding.hpp"
#include "qsv/pipeline/config.hpp"
#include "qsv/retrieval.hpp"
#include "qsv/session.hpp"
#include "qsv/stats/measure_matrix.hpp"
#include "qsv/wordnet.hpp"

namespace qsv::pipeline {

/// Everything a measurement run reads from disk or the network.
struct MeasureInputs {
    SessionCorpus corpus;
    std::optional<Qrels> qrels;
    std::optional<wordnet::SynsetGraph> wordnet;
    std::shared_ptr<EmbeddingProvider> embeddings;
    /// Entity lists keyed by session id or record id.
    std::map<std::string, std::vector<std::string>> annotations;
    std::vector<std::string> warnings;
};

/// Loads only the inputs required by `measures`. Missing session paths are
/// ConfigErrors.
MeasureInputs load_inputs(const RunConfig& config, const std::vector<std::string>& measures);

/// Parses `{"entities": {"<key>": ["<entity>", ...]}}`.
std::map<std::string, std::vector<std::string>> parse_annotations(std::string_view raw);

struct MeasureRun {
    std::vector<std::string> measures;
    PairingMode mode = PairingMode::OneToOne;
    PairingResult pairing;
    /// All simulators in the corpus, including those without pairs.
    std::vector<std::string> simulators;
    /// One row per pair, simulators in order, pairs in pairing order.
    stats::MeasureMatrix matrix;
    std::vector<std::string> warnings;
};

/// Evaluates every measure on every pair. Undefined values become missing
/// cells; other failures carry (simulator, session_id, measure) context.
MeasureRun compute_measures(const RunConfig& config, const MeasureInputs& inputs,
                            const std::vector<std::string>& measures, PairingMode mode);

/// One line per simulator with a value list per measure, in pair order.
std::string measures_jsonl(const MeasureRun& run, const RunConfig& config, const std::string& digest);

/// Computes with the configured pairing and writes measures.jsonl and
/// measures.csv into out_dir.
MeasureRun run_measures(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace qsv::pipeline
