#include "qsv/pipeline/measures.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qsv/errors.hpp"
#include "qsv/pipeline/outputs.hpp"
#include "qsv/serp.hpp"
#include "qsv/similarity.hpp"
#include "qsv/text_measures.hpp"

namespace qsv::pipeline {

using nlohmann::ordered_json;

namespace {

bool uses(const std::vector<std::string>& measures, std::initializer_list<const char*> names) {
    for (const auto& m : measures) {
        for (const char* n : names) {
            if (m == n) return true;
        }
    }
    return false;
}

std::string read_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(std::string("cannot open ") + what + ": " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<TokenizedQuery> try_tokenize(const std::string& text) {
    try {
        return tokenize(text);
    } catch (const EmptyQueryError&) {
        return std::nullopt;
    }
}

using Embeddings = std::map<std::string, std::optional<EmbeddingMatrix>>;

Embeddings fetch_all(EmbeddingProvider& provider, const std::vector<std::string>& texts, Granularity g) {
    const auto found = provider.fetch(texts, g);
    Embeddings out;
    for (std::size_t i = 0; i < texts.size(); ++i) out.emplace(texts[i], found[i]);
    return out;
}

struct PairContext {
    const SessionPair* pair;
    std::optional<TokenizedQuery> real;
    std::optional<TokenizedQuery> simulated;
};

}  // namespace

std::map<std::string, std::vector<std::string>> parse_annotations(std::string_view raw) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(raw);
    } catch (const ordered_json::parse_error& e) {
        throw DataError(std::string("annotations: malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("entities") || !doc.at("entities").is_object()) {
        throw DataError("annotations: expected {\"entities\": {...}}");
    }
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [key, list] : doc.at("entities").items()) {
        if (!list.is_array()) throw DataError("annotations.entities." + key + ": expected an array of strings");
        auto& entities = out[key];
        for (const auto& e : list) {
            if (!e.is_string()) throw DataError("annotations.entities." + key + ": expected an array of strings");
            entities.push_back(e.get<std::string>());
        }
    }
    return out;
}

MeasureInputs load_inputs(const RunConfig& config, const std::vector<std::string>& measures) {
    if (!config.real) throw ConfigError("no real sessions given (config.real or --real)");
    if (!config.simulated) throw ConfigError("no simulated sessions given (config.simulated or --simulated)");
    MeasureInputs in;
    in.corpus = build_corpus(load_sessions(config.resolve(*config.real).string(), SessionKind::Real),
                             load_sessions(config.resolve(*config.simulated).string(), SessionKind::Simulated));
    if (config.qrels && uses(measures, {"ndcg", "precision", "recall", "ap", "rr"})) {
        in.qrels = load_qrels(config.resolve(*config.qrels).string(), &in.warnings);
    }
    if (config.wordnet_dir && uses(measures, {"wordnet"})) {
        in.wordnet = wordnet::load_wndb_directory(config.resolve(*config.wordnet_dir).string());
    }
    if (config.embeddings && uses(measures, {"cosine", "bert_score"})) {
        ProviderConfig provider = *config.embeddings;
        if (provider.kind == ProviderKind::Precomputed) provider.location = config.resolve(provider.location).string();
        if (provider.cache_dir) provider.cache_dir = config.resolve(provider.cache_dir->string());
        in.embeddings = EmbeddingProvider::create(provider);
    }
    if (config.annotations && uses(measures, {"named_entities"})) {
        in.annotations = parse_annotations(read_file(config.resolve(*config.annotations), "annotations file"));
    }
    return in;
}

MeasureRun compute_measures(const RunConfig& config, const MeasureInputs& inputs,
                            const std::vector<std::string>& measures, PairingMode mode) {
    MeasureRun run{measures, mode, pair_sessions(inputs.corpus, mode), {}, stats::MeasureMatrix(measures), inputs.warnings};
    for (const auto& [sim, sessions] : inputs.corpus.simulated) run.simulators.push_back(sim);
    for (const auto& u : run.pairing.unmatched) {
        run.warnings.push_back("real session '" + u.session_id + "' has no counterpart in simulator '" + u.simulator_id + "'");
    }

    std::vector<PairContext> contexts;
    std::set<std::string> text_set;
    for (const auto& sim : run.simulators) {
        const auto it = run.pairing.pairs.find(sim);
        if (it == run.pairing.pairs.end()) continue;
        for (const auto& pair : it->second) {
            contexts.push_back({&pair, try_tokenize(pair.real.query()), try_tokenize(pair.simulated.query())});
            text_set.insert(pair.real.query());
            text_set.insert(pair.simulated.query());
        }
    }

    const std::vector<std::string> texts(text_set.begin(), text_set.end());
    Embeddings sentence, token;
    if (inputs.embeddings && !texts.empty()) {
        if (uses(measures, {"cosine"})) sentence = fetch_all(*inputs.embeddings, texts, Granularity::Sentence);
        if (uses(measures, {"bert_score"})) token = fetch_all(*inputs.embeddings, texts, Granularity::Token);
    }

    using Cell = std::optional<double>;
    using Measure = std::function<Cell(const PairContext&)>;
    auto count = [](std::size_t v) { return static_cast<double>(v); };
    auto ranked = [](const Session& s) { return make_ranked_list(s.session_id, s.serp()); };
    const std::map<std::string, Measure> evaluators{
        {"query_length_chars", [&](const PairContext& c) -> Cell { return c.simulated ? Cell(count(query_length_chars(*c.simulated))) : std::nullopt; }},
        {"query_length_terms", [&](const PairContext& c) -> Cell { return c.simulated ? Cell(count(query_length_terms(*c.simulated))) : std::nullopt; }},
        {"unique_terms", [&](const PairContext& c) -> Cell { return c.simulated ? Cell(count(unique_term_count(*c.simulated))) : std::nullopt; }},
        {"type_token_ratio", [&](const PairContext& c) -> Cell { return c.simulated ? Cell(type_token_ratio(*c.simulated)) : std::nullopt; }},
        {"flesch_kincaid_grade", [&](const PairContext& c) -> Cell { return c.simulated ? Cell(flesch_kincaid_grade(*c.simulated)) : std::nullopt; }},
        {"named_entities",
         [&](const PairContext& c) -> Cell {
             if (!c.simulated) return std::nullopt;
             const Session& s = c.pair->simulated;
             std::optional<std::vector<std::string>> annotated;
             if (auto it = inputs.annotations.find(s.id); it != inputs.annotations.end()) {
                 annotated = it->second;
             } else if (auto by_session = inputs.annotations.find(s.session_id); by_session != inputs.annotations.end()) {
                 annotated = by_session->second;
             }
             return count(named_entity_count(*c.simulated, annotated));
         }},
        {"jaccard",
         [&](const PairContext& c) -> Cell {
             if (!c.real || !c.simulated) return std::nullopt;
             return jaccard_similarity(*c.real, *c.simulated);
         }},
        {"cosine",
         [&](const PairContext& c) -> Cell {
             const auto& a = sentence.at(c.pair->real.query());
             const auto& b = sentence.at(c.pair->simulated.query());
             if (!a || !b) return std::nullopt;
             return cosine_similarity(a->rows.front(), b->rows.front());
         }},
        {"bert_score",
         [&](const PairContext& c) -> Cell {
             const auto& a = token.at(c.pair->real.query());
             const auto& b = token.at(c.pair->simulated.query());
             if (!a || !b) return std::nullopt;
             const auto score = bert_score(a->rows, b->rows);
             return score ? Cell(score->f1) : std::nullopt;
         }},
        {"wordnet",
         [&](const PairContext& c) -> Cell {
             if (!c.real || !c.simulated) return std::nullopt;
             return wordnet_similarity(*c.real, *c.simulated, *inputs.wordnet);
         }},
        {"ndcg", [&](const PairContext& c) { return ndcg_at_k(ranked(c.pair->simulated), *inputs.qrels, config.cutoff_k); }},
        {"precision", [&](const PairContext& c) { return precision_at_k(ranked(c.pair->simulated), *inputs.qrels, config.cutoff_k); }},
        {"recall", [&](const PairContext& c) { return recall_at_k(ranked(c.pair->simulated), *inputs.qrels, config.cutoff_k); }},
        {"ap", [&](const PairContext& c) { return average_precision(ranked(c.pair->simulated), *inputs.qrels); }},
        {"rr", [&](const PairContext& c) { return reciprocal_rank(ranked(c.pair->simulated), *inputs.qrels); }},
        {"serp_jaccard",
         [&](const PairContext& c) { return serp_jaccard(ranked(c.pair->real), ranked(c.pair->simulated), config.cutoff_k); }},
        {"rbo", [&](const PairContext& c) { return rbo(ranked(c.pair->real), ranked(c.pair->simulated), config.rbo); }},
    };

    std::vector<const Measure*> selected;
    for (const auto& name : measures) {
        const auto it = evaluators.find(name);
        if (it == evaluators.end()) throw ConfigError("unknown measure '" + name + "'");
        selected.push_back(&it->second);
    }
    if (uses(measures, {"ndcg", "precision", "recall"}) && config.cutoff_k == 0) {
        throw ConfigError("cutoff_k must be positive");
    }
    validate(config.rbo);

    for (const auto& c : contexts) {
        stats::Series row;
        for (std::size_t m = 0; m < selected.size(); ++m) {
            try {
                row.push_back((*selected[m])(c));
            } catch (const DataError& e) {
                throw DataError("simulator '" + c.pair->simulator_id + "', session '" + c.pair->session_id +
                                "', measure '" + measures[m] + "': " + e.what());
            }
        }
        run.matrix.add_row({c.pair->simulator_id, c.pair->session_id, c.pair->effective_rank}, std::move(row));
    }
    return run;
}

std::string measures_jsonl(const MeasureRun& run, const RunConfig& config, const std::string& digest) {
    std::string out;
    const auto& keys = run.matrix.row_keys();
    for (const auto& sim : run.simulators) {
        ordered_json line;
        line["simulator_id"] = sim;
        const auto header = report_header(digest);
        for (const auto& [k, v] : header.items()) line[k] = v;
        line["pairing"] = std::string(to_string(run.mode));
        line["params"] = {{"cutoff_k", config.cutoff_k},
                          {"rbo", {{"p", config.rbo.p}, {"depth", config.rbo.depth},
                                   {"variant", std::string(to_string(config.rbo.variant))}}}};
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < keys.size(); ++r) {
            if (keys[r].simulator_id == sim) rows.push_back(r);
        }
        line["session_ids"] = ordered_json::array();
        line["ranks"] = ordered_json::array();
        for (const auto r : rows) {
            line["session_ids"].push_back(keys[r].session_id);
            line["ranks"].push_back(keys[r].rank);
        }
        line["measures"] = ordered_json::object();
        for (std::size_t c = 0; c < run.measures.size(); ++c) {
            auto values = ordered_json::array();
            for (const auto r : rows) values.push_back(optional_number(run.matrix.at(r, c)));
            line["measures"][run.measures[c]] = std::move(values);
        }
        out += line.dump() + "\n";
    }
    return out;
}

MeasureRun run_measures(const RunConfig& config, const std::filesystem::path& out_dir) {
    const auto measures = enabled_measures(config);
    const auto inputs = load_inputs(config, measures);
    MeasureRun run = compute_measures(config, inputs, measures, config.pairing);
    const std::string digest = config_digest(config);
    write_file_atomic(out_dir / "measures.jsonl", measures_jsonl(run, config, digest));
    write_file_atomic(out_dir / "measures.csv", stats::to_csv(run.matrix, provenance_line(digest)));
    return run;
}

}  // namespace qsv::pipeline
