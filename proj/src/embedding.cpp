#include "qsv/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "qsv/digest.hpp"
#include "qsv/errors.hpp"
#include "qsv/http.hpp"
#include "qsv/unicode.hpp"

namespace qsv {

using nlohmann::json;

std::string_view to_string(Granularity g) { return g == Granularity::Sentence ? "sentence" : "token"; }

Granularity parse_granularity(std::string_view text) {
    if (text == "sentence") return Granularity::Sentence;
    if (text == "token") return Granularity::Token;
    throw DataError("unknown granularity '" + std::string(text) + "'");
}

namespace {

std::vector<double> parse_vector(const json& v, std::size_t dim, const std::string& where) {
    if (!v.is_array()) throw DataError(where + ": expected array of numbers");
    if (v.size() != dim) {
        throw DataError(where + ": vector has " + std::to_string(v.size()) + " values, expected dim " + std::to_string(dim));
    }
    std::vector<double> out;
    out.reserve(dim);
    for (const auto& x : v) {
        if (!x.is_number()) throw DataError(where + ": expected number");
        out.push_back(x.get<double>());
    }
    return out;
}

// Sentence embeddings are a flat vector, token embeddings a list of rows.
std::vector<std::vector<double>> parse_rows(const json& v, Granularity g, std::size_t dim, const std::string& where) {
    if (g == Granularity::Sentence) return {parse_vector(v, dim, where)};
    if (!v.is_array()) throw DataError(where + ": expected array of token vectors");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < v.size(); ++i) rows.push_back(parse_vector(v[i], dim, where + "[" + std::to_string(i) + "]"));
    return rows;
}

json rows_to_json(const EmbeddingMatrix& m, Granularity g) {
    if (g == Granularity::Sentence) return m.rows.front();
    return m.rows;
}

}  // namespace

EmbeddingProvider::EmbeddingProvider(ProviderConfig config) : config_(std::move(config)) {}

std::shared_ptr<EmbeddingProvider> EmbeddingProvider::create(const ProviderConfig& config) {
    if (config.kind == ProviderKind::Remote) {
        (void)http::parse_url(config.location);
        return std::make_shared<EmbeddingProvider>(config);
    }
    auto provider = std::make_shared<EmbeddingProvider>(config);
    provider->load_file(config.location);
    return provider;
}

std::shared_ptr<EmbeddingProvider> EmbeddingProvider::load_precomputed(const std::filesystem::path& path,
                                                                       std::string model_id) {
    ProviderConfig config;
    config.kind = ProviderKind::Precomputed;
    config.location = path.string();
    config.model_id = std::move(model_id);
    return create(config);
}

std::string EmbeddingProvider::cache_key(std::string_view model_id, Granularity granularity, std::string_view text) {
    // Length-prefixed fields keep the encoding unambiguous.
    const std::string normalized = unicode::nfc(text);
    std::string material;
    for (const std::string_view part : {model_id, to_string(granularity), std::string_view(normalized)}) {
        material += std::to_string(part.size());
        material += ':';
        material += part;
    }
    return sha256_hex(material);
}

void EmbeddingProvider::check_dim(std::size_t dim) {
    if (dim == 0) throw DataError("embedding dim must be positive");
    if (dim_ && *dim_ != dim) {
        throw DataError("embedding dimension drift: expected " + std::to_string(*dim_) + ", got " + std::to_string(dim));
    }
    dim_ = dim;
}

void EmbeddingProvider::load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open embeddings file: " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        json entry;
        try {
            entry = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(where + ": malformed JSON: " + e.what());
        }
        if (!entry.is_object() || !entry.contains("text") || !entry.contains("granularity") ||
            !entry.contains("dim") || !entry.contains("embedding")) {
            throw DataError(where + ": expected text, granularity, dim and embedding fields");
        }
        if (!entry["text"].is_string() || !entry["granularity"].is_string() || !entry["dim"].is_number_unsigned()) {
            throw DataError(where + ": field has the wrong type");
        }
        const auto granularity = parse_granularity(entry["granularity"].get<std::string>());
        const auto dim = entry["dim"].get<std::size_t>();
        try {
            check_dim(dim);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        EmbeddingMatrix m{parse_rows(entry["embedding"], granularity, dim, where), dim, config_.model_id};
        precomputed_[cache_key(config_.model_id, granularity, entry["text"].get<std::string>())] = std::move(m);
    }
}

std::size_t EmbeddingProvider::remote_calls() const {
    std::lock_guard lock(mutex_);
    return remote_calls_;
}

std::optional<EmbeddingMatrix> EmbeddingProvider::read_disk_cache(const std::string& key) const {
    if (!config_.cache_dir) return std::nullopt;
    std::ifstream in(*config_.cache_dir / (key + ".json"), std::ios::binary);
    if (!in) return std::nullopt;
    try {
        const json entry = json::parse(in);
        if (entry.at("model").get<std::string>() != config_.model_id) return std::nullopt;
        const auto granularity = parse_granularity(entry.at("granularity").get<std::string>());
        const auto dim = entry.at("dim").get<std::size_t>();
        return EmbeddingMatrix{parse_rows(entry.at("embedding"), granularity, dim, key), dim, config_.model_id};
    } catch (const std::exception&) {
        return std::nullopt;  // unreadable entries are refetched
    }
}

void EmbeddingProvider::write_disk_cache(const std::string& key, Granularity granularity, const std::string& text,
                                         const EmbeddingMatrix& m) const {
    if (!config_.cache_dir) return;
    static std::atomic<unsigned> counter{0};
    std::filesystem::create_directories(*config_.cache_dir);
    const auto final_path = *config_.cache_dir / (key + ".json");
    const auto tmp_path = *config_.cache_dir /
                          (key + ".json.tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++));
    json entry{{"model", config_.model_id},
               {"granularity", std::string(to_string(granularity))},
               {"text", text},
               {"dim", m.dim},
               {"embedding", rows_to_json(m, granularity)}};
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write embedding cache entry " + tmp_path.string());
        out << entry.dump();
        if (!out) throw DataError("cannot write embedding cache entry " + tmp_path.string());
    }
    std::filesystem::rename(tmp_path, final_path);
}

std::vector<EmbeddingMatrix> EmbeddingProvider::fetch_remote(const std::vector<std::string>& texts,
                                                             Granularity granularity) {
    const json request{{"model", config_.model_id},
                       {"granularity", std::string(to_string(granularity))},
                       {"texts", texts}};
    ++remote_calls_;
    const std::string body = http::post_json(config_.location, request.dump(),
                                             {config_.max_attempts, config_.initial_backoff, config_.timeout});
    json response;
    try {
        response = json::parse(body);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("embedding service returned malformed JSON: ") + e.what());
    }
    if (!response.is_object() || !response.contains("dim") || !response.contains("embeddings") ||
        !response["dim"].is_number_unsigned() || !response["embeddings"].is_array()) {
        throw DataError("embedding service response lacks dim/embeddings");
    }
    const auto& embeddings = response["embeddings"];
    if (embeddings.size() != texts.size()) {
        throw DataError("embedding service count mismatch: sent " + std::to_string(texts.size()) + " texts, got " +
                        std::to_string(embeddings.size()) + " embeddings");
    }
    const auto dim = response["dim"].get<std::size_t>();
    std::vector<EmbeddingMatrix> out;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        out.push_back({parse_rows(embeddings[i], granularity, dim, "embeddings[" + std::to_string(i) + "]"), dim,
                       config_.model_id});
    }
    return out;
}

EmbeddingLookup EmbeddingProvider::fetch(const std::vector<std::string>& texts, Granularity granularity) {
    std::lock_guard lock(mutex_);
    EmbeddingLookup result(texts.size());
    std::vector<std::string> keys;
    keys.reserve(texts.size());
    for (const auto& t : texts) keys.push_back(cache_key(config_.model_id, granularity, t));

    if (config_.kind == ProviderKind::Precomputed) {
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (const auto it = precomputed_.find(keys[i]); it != precomputed_.end()) result[i] = it->second;
        }
        return result;
    }

    std::map<std::string, EmbeddingMatrix> found;
    std::vector<std::string> missing_texts;
    std::vector<std::string> missing_keys;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const auto& key = keys[i];
        if (found.contains(key)) continue;
        if (const auto it = cache_.find(key); it != cache_.end()) {
            found.emplace(key, it->second);
        } else if (auto disk = read_disk_cache(key)) {
            found.emplace(key, std::move(*disk));
        } else if (std::find(missing_keys.begin(), missing_keys.end(), key) == missing_keys.end()) {
            missing_keys.push_back(key);
            missing_texts.push_back(texts[i]);
        }
    }

    std::vector<EmbeddingMatrix> fetched;
    if (!missing_texts.empty()) fetched = fetch_remote(missing_texts, granularity);

    // Validate the whole batch before any cache mutation.
    std::optional<std::size_t> dim = dim_;
    auto check = [&](std::size_t d) {
        if (dim && *dim != d) {
            throw DataError("embedding dimension drift: expected " + std::to_string(*dim) + ", got " + std::to_string(d));
        }
        dim = d;
    };
    for (const auto& [key, m] : found) check(m.dim);
    for (const auto& m : fetched) check(m.dim);
    dim_ = dim;

    for (std::size_t i = 0; i < fetched.size(); ++i) {
        write_disk_cache(missing_keys[i], granularity, missing_texts[i], fetched[i]);
        found.emplace(missing_keys[i], fetched[i]);
    }
    for (const auto& [key, m] : found) cache_.emplace(key, m);
    for (std::size_t i = 0; i < texts.size(); ++i) result[i] = found.at(keys[i]);
    return result;
}

}  // namespace qsv
