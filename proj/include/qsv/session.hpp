#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qsv {

struct Interaction {
    std::string query;
    std::vector<std::string> serp;
    std::optional<std::vector<std::string>> clicked_doc_ids;
    /// Set when the SERP was filled in by the augmentation step.
    bool augmented = false;

    bool operator==(const Interaction&) const = default;
};

struct Session {
    std::string session_id;
    std::string id;
    std::vector<Interaction> interactions;
    std::optional<std::int64_t> rank;
    std::optional<std::string> simulator_id;

    /// Query of record: the first interaction's query.
    const std::string& query() const { return interactions.front().query; }
    const std::vector<std::string>& serp() const { return interactions.front().serp; }

    bool operator==(const Session&) const = default;
};

enum class SessionKind { Real, Simulated };

struct SessionCorpus {
    std::vector<Session> real;
    /// Keyed by simulator_id; each list keeps input order.
    std::map<std::string, std::vector<Session>> simulated;
};

enum class PairingMode { OneToOne, OneToMany };

std::string_view to_string(PairingMode mode);
/// Accepts "one-to-one" and "one-to-many".
PairingMode parse_pairing_mode(std::string_view text);

struct SessionPair {
    std::string session_id;
    Session real;
    Session simulated;
    std::string simulator_id;
    /// rank field when present, otherwise 1-based position among the
    /// simulator's candidates for this session.
    std::int64_t effective_rank = 1;
};

struct UnmatchedSession {
    std::string simulator_id;
    std::string session_id;
};

struct PairingResult {
    std::map<std::string, std::vector<SessionPair>> pairs;
    /// Real sessions with no counterpart in a simulator. Reported, not fatal.
    std::vector<UnmatchedSession> unmatched;
};

/// Parses `{"sessions": [...]}`. Throws DataError with a JSON path on the
/// first schema violation.
std::vector<Session> parse_sessions(std::string_view raw, SessionKind kind);
std::vector<Session> load_sessions(const std::string& path, SessionKind kind);

/// Inverse of parse_sessions. Optional fields are only written when set.
std::string serialize_sessions(const std::vector<Session>& sessions);

SessionCorpus build_corpus(std::vector<Session> real, std::vector<Session> simulated);

PairingResult pair_sessions(const SessionCorpus& corpus, PairingMode mode);

}  // namespace qsv
