#include "qsv/pipeline/augment.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "qsv/errors.hpp"
#include "qsv/pipeline/outputs.hpp"

namespace qsv::pipeline {

namespace {

std::vector<std::string> parse_response(const std::string& body, std::size_t k) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("search endpoint returned malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("doc_ids") || !doc.at("doc_ids").is_array()) {
        throw DataError("search endpoint response lacks a doc_ids array");
    }
    std::vector<std::string> ids;
    std::set<std::string> seen;
    for (const auto& v : doc.at("doc_ids")) {
        if (!v.is_string()) throw DataError("search endpoint returned a non-string doc id");
        auto id = v.get<std::string>();
        if (!seen.insert(id).second) throw DataError("duplicate in SERP: '" + id + "'");
        ids.push_back(std::move(id));
    }
    if (ids.size() > k) ids.resize(k);
    return ids;
}

}  // namespace

AugmentResult augment_serps(std::vector<Session> sessions, const AugmentOptions& options) {
    if (options.k == 0) throw ConfigError("augmentation depth k must be positive");
    (void)http::parse_url(options.endpoint);

    std::vector<Interaction*> todo;
    for (auto& s : sessions) {
        for (auto& i : s.interactions) {
            if (i.serp.empty()) todo.push_back(&i);
        }
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        while (!failed) {
            const std::size_t idx = next++;
            if (idx >= todo.size()) return;
            try {
                Interaction& interaction = *todo[idx];
                const nlohmann::json request{{"query", interaction.query}, {"k", options.k}};
                interaction.serp = parse_response(http::post_json(options.endpoint, request.dump(), options.retry), options.k);
                interaction.augmented = true;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };

    const std::size_t n_threads = std::min(std::max<std::size_t>(options.concurrency, 1), std::max<std::size_t>(todo.size(), 1));
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
    return {std::move(sessions), todo.size()};
}

AugmentResult augment_file(const std::filesystem::path& input, SessionKind kind, const std::filesystem::path& output,
                           const AugmentOptions& options) {
    auto result = augment_serps(load_sessions(input.string(), kind), options);
    write_file_atomic(output, serialize_sessions(result.sessions));
    return result;
}

}  // namespace qsv::pipeline
