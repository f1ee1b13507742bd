#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qsv {

enum class Granularity { Sentence, Token };

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view text);

struct EmbeddingMatrix {
    /// One row for sentence granularity, one per token otherwise.
    std::vector<std::vector<double>> rows;
    std::size_t dim = 0;
    std::string model_id;

    bool operator==(const EmbeddingMatrix&) const = default;
};

enum class ProviderKind { Precomputed, Remote };

struct ProviderConfig {
    ProviderKind kind = ProviderKind::Precomputed;
    /// File path for precomputed, absolute http(s) URL for remote.
    std::string location;
    std::string model_id = "default";
    std::optional<std::filesystem::path> cache_dir;
    std::chrono::milliseconds timeout{30000};
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{250};
};

/// A lookup result per input text; nullopt marks a precomputed miss.
using EmbeddingLookup = std::vector<std::optional<EmbeddingMatrix>>;

/// Sentence/token embeddings from a JSON Lines file or a remote service.
///
/// Results are cached in memory (and on disk when cache_dir is set) under
/// sha256(model_id, granularity, NFC text). Fetch is safe to call from
/// several threads.
class EmbeddingProvider {
public:
    static std::shared_ptr<EmbeddingProvider> create(const ProviderConfig& config);
    static std::shared_ptr<EmbeddingProvider> load_precomputed(const std::filesystem::path& path,
                                                               std::string model_id = "default");

    EmbeddingLookup fetch(const std::vector<std::string>& texts, Granularity granularity);

    const ProviderConfig& config() const { return config_; }
    std::size_t entry_count() const { return precomputed_.size(); }
    /// HTTP requests issued so far (remote kind only).
    std::size_t remote_calls() const;

    explicit EmbeddingProvider(ProviderConfig config);

    static std::string cache_key(std::string_view model_id, Granularity granularity,
                                 std::string_view text);

private:
    void load_file(const std::filesystem::path& path);
    void check_dim(std::size_t dim);
    std::optional<EmbeddingMatrix> read_disk_cache(const std::string& key) const;
    void write_disk_cache(const std::string& key, Granularity granularity, const std::string& text,
                          const EmbeddingMatrix& m) const;
    std::vector<EmbeddingMatrix> fetch_remote(const std::vector<std::string>& texts,
                                              Granularity granularity);

    ProviderConfig config_;
    std::map<std::string, EmbeddingMatrix> precomputed_;
    std::map<std::string, EmbeddingMatrix> cache_;
    std::optional<std::size_t> dim_;
    std::size_t remote_calls_ = 0;
    mutable std::mutex mutex_;
};

}  // namespace qsv
