#include "qsv/pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "qsv/digest.hpp"
#include "qsv/errors.hpp"

namespace qsv::pipeline {

using nlohmann::ordered_json;

namespace {

const std::vector<std::string> kCatalog{
    "query_length_chars", "query_length_terms", "unique_terms", "type_token_ratio", "flesch_kincaid_grade",
    "named_entities",     "jaccard",            "cosine",       "bert_score",       "wordnet",
    "ndcg",               "precision",          "recall",       "ap",               "rr",
    "serp_jaccard",       "rbo",
};

void reject_unknown(const ordered_json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

const ordered_json& object_at(const ordered_json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_object()) throw ConfigError(where + "." + key + ": expected an object");
    return v;
}

std::string get_string(const ordered_json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where + ": expected a string");
    return v.get<std::string>();
}

std::optional<std::string> get_path(const ordered_json& obj, const char* key) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return get_string(obj.at(key), std::string("config.") + key);
}

std::uint64_t get_unsigned(const ordered_json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError(where + ": expected a non-negative integer");
    }
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
}

double get_number(const ordered_json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    return v.get<double>();
}

bool get_bool(const ordered_json& v, const std::string& where) {
    if (!v.is_boolean()) throw ConfigError(where + ": expected true or false");
    return v.get<bool>();
}

ProviderConfig parse_provider(const ordered_json& e) {
    const std::string where = "config.embeddings";
    reject_unknown(e, where,
                   {"kind", "location", "model_id", "cache_dir", "timeout_ms", "max_attempts", "initial_backoff_ms"});
    ProviderConfig p;
    if (!e.contains("kind") || !e.contains("location")) throw ConfigError(where + ": kind and location are required");
    const std::string kind = get_string(e.at("kind"), where + ".kind");
    if (kind == "precomputed") {
        p.kind = ProviderKind::Precomputed;
    } else if (kind == "remote") {
        p.kind = ProviderKind::Remote;
    } else {
        throw ConfigError(where + ".kind: expected precomputed or remote");
    }
    p.location = get_string(e.at("location"), where + ".location");
    if (e.contains("model_id")) p.model_id = get_string(e.at("model_id"), where + ".model_id");
    if (e.contains("cache_dir") && !e.at("cache_dir").is_null()) {
        p.cache_dir = get_string(e.at("cache_dir"), where + ".cache_dir");
    }
    if (e.contains("timeout_ms")) {
        p.timeout = std::chrono::milliseconds(get_unsigned(e.at("timeout_ms"), where + ".timeout_ms"));
    }
    if (e.contains("max_attempts")) {
        p.max_attempts = static_cast<int>(get_unsigned(e.at("max_attempts"), where + ".max_attempts"));
        if (p.max_attempts < 1) throw ConfigError(where + ".max_attempts: must be at least 1");
    }
    if (e.contains("initial_backoff_ms")) {
        p.initial_backoff =
            std::chrono::milliseconds(get_unsigned(e.at("initial_backoff_ms"), where + ".initial_backoff_ms"));
    }
    return p;
}

}  // namespace

const std::vector<std::string>& measure_catalog() { return kCatalog; }

std::vector<stats::Cluster> default_clusters() {
    return {
        {"query_statistics",
         {"query_length_chars", "query_length_terms", "unique_terms", "type_token_ratio", "flesch_kincaid_grade",
          "named_entities"}},
        {"query_similarity", {"jaccard", "cosine", "bert_score", "wordnet"}},
        {"ir_metrics", {"ndcg", "precision", "recall", "ap", "rr"}},
        {"serp_overlap", {"serp_jaccard", "rbo"}},
    };
}

std::filesystem::path RunConfig::resolve(const std::string& path) const {
    const std::filesystem::path p(path);
    return p.is_absolute() ? p : base_dir / p;
}

RunConfig parse_config(const ordered_json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown(doc, "config",
                   {"real", "simulated", "qrels", "wordnet_dir", "annotations", "embeddings", "pairing", "measures",
                    "cutoff_k", "rbo", "nmi", "efa", "bootstrap", "clusters", "heatmap", "augment", "out", "seed"});
    RunConfig c;
    c.base_dir = base_dir;
    c.real = get_path(doc, "real");
    c.simulated = get_path(doc, "simulated");
    c.qrels = get_path(doc, "qrels");
    c.wordnet_dir = get_path(doc, "wordnet_dir");
    c.annotations = get_path(doc, "annotations");
    if (doc.contains("embeddings") && !doc.at("embeddings").is_null()) {
        c.embeddings = parse_provider(object_at(doc, "embeddings", "config"));
    }
    if (doc.contains("pairing")) c.pairing = parse_pairing_mode(get_string(doc.at("pairing"), "config.pairing"));
    if (doc.contains("measures")) {
        for (const auto& [name, value] : object_at(doc, "measures", "config").items()) {
            c.measures[name] = get_bool(value, "config.measures." + name);
        }
    }
    if (doc.contains("cutoff_k")) c.cutoff_k = get_unsigned(doc.at("cutoff_k"), "config.cutoff_k");
    if (doc.contains("rbo")) {
        const auto& r = object_at(doc, "rbo", "config");
        reject_unknown(r, "config.rbo", {"p", "depth", "variant"});
        if (r.contains("p")) c.rbo.p = get_number(r.at("p"), "config.rbo.p");
        if (r.contains("depth")) c.rbo.depth = get_unsigned(r.at("depth"), "config.rbo.depth");
        if (r.contains("variant")) c.rbo.variant = parse_rbo_variant(get_string(r.at("variant"), "config.rbo.variant"));
    }
    if (doc.contains("nmi")) {
        const auto& n = object_at(doc, "nmi", "config");
        reject_unknown(n, "config.nmi", {"bins", "nmi_threshold", "linear_threshold"});
        if (n.contains("bins") && !n.at("bins").is_null()) {
            c.nmi_bins = static_cast<int>(get_unsigned(n.at("bins"), "config.nmi.bins"));
        }
        if (n.contains("nmi_threshold")) c.thresholds.nmi = get_number(n.at("nmi_threshold"), "config.nmi.nmi_threshold");
        if (n.contains("linear_threshold")) {
            c.thresholds.linear = get_number(n.at("linear_threshold"), "config.nmi.linear_threshold");
        }
    }
    if (doc.contains("efa")) {
        const auto& e = object_at(doc, "efa", "config");
        reject_unknown(e, "config.efa", {"n_factors", "max_iter", "tol", "max_missing_fraction"});
        if (e.contains("n_factors") && !e.at("n_factors").is_null()) {
            c.efa.n_factors = static_cast<int>(get_unsigned(e.at("n_factors"), "config.efa.n_factors"));
        }
        if (e.contains("max_iter")) c.efa.max_iter = static_cast<int>(get_unsigned(e.at("max_iter"), "config.efa.max_iter"));
        if (e.contains("tol")) c.efa.tol = get_number(e.at("tol"), "config.efa.tol");
        if (e.contains("max_missing_fraction")) {
            c.efa.max_missing_fraction = get_number(e.at("max_missing_fraction"), "config.efa.max_missing_fraction");
        }
    }
    if (doc.contains("bootstrap")) {
        const auto& b = object_at(doc, "bootstrap", "config");
        reject_unknown(b, "config.bootstrap", {"iterations", "modes"});
        if (b.contains("iterations")) c.bootstrap.iterations = get_unsigned(b.at("iterations"), "config.bootstrap.iterations");
        if (b.contains("modes")) {
            if (!b.at("modes").is_array()) throw ConfigError("config.bootstrap.modes: expected an array");
            c.bootstrap.modes.clear();
            for (const auto& m : b.at("modes")) {
                c.bootstrap.modes.push_back(stats::parse_bootstrap_mode(get_string(m, "config.bootstrap.modes[]")));
            }
        }
    }
    if (doc.contains("clusters")) {
        for (const auto& [name, members] : object_at(doc, "clusters", "config").items()) {
            if (!members.is_array()) throw ConfigError("config.clusters." + name + ": expected an array of measure names");
            stats::Cluster cluster{name, {}};
            for (const auto& m : members) cluster.members.push_back(get_string(m, "config.clusters." + name + "[]"));
            c.clusters.push_back(std::move(cluster));
        }
    }
    if (doc.contains("heatmap")) c.heatmap = get_bool(doc.at("heatmap"), "config.heatmap");
    if (doc.contains("augment")) {
        const auto& a = object_at(doc, "augment", "config");
        reject_unknown(a, "config.augment", {"endpoint", "k", "concurrency"});
        if (a.contains("endpoint") && !a.at("endpoint").is_null()) {
            c.augment.endpoint = get_string(a.at("endpoint"), "config.augment.endpoint");
        }
        if (a.contains("k")) c.augment.k = get_unsigned(a.at("k"), "config.augment.k");
        if (a.contains("concurrency")) c.augment.concurrency = get_unsigned(a.at("concurrency"), "config.augment.concurrency");
    }
    if (doc.contains("out")) c.out = get_string(doc.at("out"), "config.out");
    if (doc.contains("seed")) c.seed = get_unsigned(doc.at("seed"), "config.seed");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const ordered_json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

ordered_json config_to_json(const RunConfig& c) {
    auto opt = [](const std::optional<std::string>& s) { return s ? ordered_json(*s) : ordered_json(nullptr); };
    ordered_json doc;
    doc["real"] = opt(c.real);
    doc["simulated"] = opt(c.simulated);
    doc["qrels"] = opt(c.qrels);
    doc["wordnet_dir"] = opt(c.wordnet_dir);
    doc["annotations"] = opt(c.annotations);
    if (c.embeddings) {
        const auto& p = *c.embeddings;
        doc["embeddings"] = {
            {"kind", p.kind == ProviderKind::Precomputed ? "precomputed" : "remote"},
            {"location", p.location},
            {"model_id", p.model_id},
            {"cache_dir", p.cache_dir ? ordered_json(p.cache_dir->string()) : ordered_json(nullptr)},
            {"timeout_ms", p.timeout.count()},
            {"max_attempts", p.max_attempts},
            {"initial_backoff_ms", p.initial_backoff.count()},
        };
    } else {
        doc["embeddings"] = nullptr;
    }
    doc["pairing"] = std::string(to_string(c.pairing));
    doc["measures"] = ordered_json::object();
    for (const auto& [name, on] : c.measures) doc["measures"][name] = on;
    doc["cutoff_k"] = c.cutoff_k;
    doc["rbo"] = {{"p", c.rbo.p}, {"depth", c.rbo.depth}, {"variant", std::string(to_string(c.rbo.variant))}};
    doc["nmi"] = {{"bins", c.nmi_bins ? ordered_json(*c.nmi_bins) : ordered_json(nullptr)},
                  {"nmi_threshold", c.thresholds.nmi},
                  {"linear_threshold", c.thresholds.linear}};
    doc["efa"] = {{"n_factors", c.efa.n_factors ? ordered_json(*c.efa.n_factors) : ordered_json(nullptr)},
                  {"max_iter", c.efa.max_iter},
                  {"tol", c.efa.tol},
                  {"max_missing_fraction", c.efa.max_missing_fraction}};
    ordered_json modes = ordered_json::array();
    for (const auto m : c.bootstrap.modes) modes.push_back(std::string(stats::to_string(m)));
    doc["bootstrap"] = {{"iterations", c.bootstrap.iterations}, {"modes", modes}};
    doc["clusters"] = ordered_json::object();
    for (const auto& cl : c.clusters) doc["clusters"][cl.name] = cl.members;
    doc["heatmap"] = c.heatmap;
    doc["augment"] = {{"endpoint", opt(c.augment.endpoint)}, {"k", c.augment.k}, {"concurrency", c.augment.concurrency}};
    doc["seed"] = c.seed;
    return doc;
}

std::string config_digest(const RunConfig& config) { return sha256_hex(config_to_json(config).dump()); }

std::vector<std::string> enabled_measures(const RunConfig& c) {
    const std::set<std::string> known(kCatalog.begin(), kCatalog.end());
    for (const auto& [name, on] : c.measures) {
        if (!known.contains(name)) throw ConfigError("config.measures: unknown measure '" + name + "'");
    }
    auto requirement = [&](const std::string& name) -> std::optional<std::string> {
        if (name == "cosine" || name == "bert_score") {
            if (!c.embeddings) return "an embeddings provider (config.embeddings)";
        } else if (name == "wordnet") {
            if (!c.wordnet_dir) return "a WordNet database directory (config.wordnet_dir)";
        } else if (name == "ndcg" || name == "precision" || name == "recall" || name == "ap" || name == "rr") {
            if (!c.qrels) return "a qrels file (config.qrels or --qrels)";
        }
        return std::nullopt;
    };
    std::vector<std::string> out;
    for (const auto& name : kCatalog) {
        const auto missing = requirement(name);
        const auto it = c.measures.find(name);
        if (it != c.measures.end()) {
            if (!it->second) continue;
            if (missing) throw ConfigError("measure '" + name + "' is enabled but requires " + *missing);
            out.push_back(name);
        } else if (!missing) {
            out.push_back(name);
        }
    }
    return out;
}

}  // namespace qsv::pipeline
