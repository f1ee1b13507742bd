#include "qsv/session.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "qsv/errors.hpp"

namespace qsv {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw DataError(path + ": " + what);
}

const json& require(const json& obj, const char* field, const std::string& path) {
    const auto it = obj.find(field);
    if (it == obj.end()) fail(path + "." + field, "missing required field");
    return *it;
}

std::string require_string(const json& obj, const char* field, const std::string& path) {
    const json& v = require(obj, field, path);
    if (!v.is_string()) fail(path + "." + field, "expected string");
    return v.get<std::string>();
}

std::vector<std::string> string_list(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected array of strings");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_string()) fail(path + "[" + std::to_string(i) + "]", "expected string");
        out.push_back(v[i].get<std::string>());
    }
    return out;
}

Interaction parse_interaction(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected object");
    Interaction it;
    it.query = require_string(v, "query", path);
    it.serp = string_list(require(v, "serp", path), path + ".serp");

    std::set<std::string_view> seen;
    for (const auto& doc : it.serp) {
        if (!seen.insert(doc).second) fail(path + ".serp", "duplicate document id '" + doc + "'");
    }
    if (const auto c = v.find("clicked_doc_ids"); c != v.end() && !c->is_null()) {
        it.clicked_doc_ids = string_list(*c, path + ".clicked_doc_ids");
        for (const auto& doc : *it.clicked_doc_ids) {
            if (!seen.contains(doc)) fail(path + ".clicked_doc_ids", "clicked document '" + doc + "' is not in serp");
        }
    }
    if (const auto a = v.find("augmented"); a != v.end()) {
        if (!a->is_boolean()) fail(path + ".augmented", "expected boolean");
        it.augmented = a->get<bool>();
    }
    return it;
}

Session parse_session(const json& v, const std::string& path, SessionKind kind) {
    if (!v.is_object()) fail(path, "expected object");
    Session s;
    s.session_id = require_string(v, "session_id", path);
    s.id = require_string(v, "id", path);

    if (const auto sim = v.find("simulator_id"); sim != v.end() && !sim->is_null()) {
        if (!sim->is_string()) fail(path + ".simulator_id", "expected string");
        s.simulator_id = sim->get<std::string>();
    }
    if (const auto rank = v.find("rank"); rank != v.end() && !rank->is_null()) {
        if (kind == SessionKind::Real) fail(path + ".rank", "rank is only allowed on simulated sessions");
        if (!rank->is_number_integer()) fail(path + ".rank", "expected integer");
        const auto r = rank->get<std::int64_t>();
        if (r < 1) fail(path + ".rank", "rank must be >= 1");
        s.rank = r;
    }

    const json& interactions = require(v, "interactions", path);
    if (!interactions.is_array()) fail(path + ".interactions", "expected array");
    if (interactions.empty()) fail(path + ".interactions", "at least one interaction is required");
    for (std::size_t i = 0; i < interactions.size(); ++i) {
        s.interactions.push_back(parse_interaction(interactions[i], path + ".interactions[" + std::to_string(i) + "]"));
    }
    return s;
}

}  // namespace

std::string_view to_string(PairingMode mode) {
    return mode == PairingMode::OneToOne ? "one-to-one" : "one-to-many";
}

PairingMode parse_pairing_mode(std::string_view text) {
    if (text == "one-to-one") return PairingMode::OneToOne;
    if (text == "one-to-many") return PairingMode::OneToMany;
    throw ConfigError("unknown pairing mode '" + std::string(text) + "' (expected one-to-one or one-to-many)");
}

std::vector<Session> parse_sessions(std::string_view raw, SessionKind kind) {
    json doc;
    try {
        doc = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("$", "expected object with a 'sessions' array");
    const json& sessions = require(doc, "sessions", "$");
    if (!sessions.is_array()) fail("$.sessions", "expected array");

    std::vector<Session> out;
    out.reserve(sessions.size());
    std::set<std::string> ids;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const std::string path = "$.sessions[" + std::to_string(i) + "]";
        Session s = parse_session(sessions[i], path, kind);
        if (!ids.insert(s.id).second) fail(path + ".id", "duplicate id '" + s.id + "'");
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Session> load_sessions(const std::string& path, SessionKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open session file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_sessions(buf.str(), kind);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::string serialize_sessions(const std::vector<Session>& sessions) {
    ordered_json list = ordered_json::array();
    for (const auto& s : sessions) {
        ordered_json js;
        js["session_id"] = s.session_id;
        js["id"] = s.id;
        if (s.simulator_id) js["simulator_id"] = *s.simulator_id;
        if (s.rank) js["rank"] = *s.rank;
        ordered_json interactions = ordered_json::array();
        for (const auto& it : s.interactions) {
            ordered_json ji;
            ji["query"] = it.query;
            ji["serp"] = it.serp;
            if (it.clicked_doc_ids) ji["clicked_doc_ids"] = *it.clicked_doc_ids;
            if (it.augmented) ji["augmented"] = true;
            interactions.push_back(std::move(ji));
        }
        js["interactions"] = std::move(interactions);
        list.push_back(std::move(js));
    }
    ordered_json doc;
    doc["sessions"] = std::move(list);
    return doc.dump(2) + "\n";
}

SessionCorpus build_corpus(std::vector<Session> real, std::vector<Session> simulated) {
    SessionCorpus corpus;
    std::set<std::string> real_keys;
    for (auto& s : real) {
        if (!real_keys.insert(s.session_id).second) {
            throw DataError("duplicate real session_id '" + s.session_id + "'");
        }
        corpus.real.push_back(std::move(s));
    }

    std::set<std::tuple<std::string, std::string, std::int64_t>> ranked;
    for (auto& s : simulated) {
        if (!s.simulator_id) throw DataError("simulated session '" + s.id + "' has no simulator_id");
        if (s.rank && !ranked.emplace(*s.simulator_id, s.session_id, *s.rank).second) {
            throw DataError("simulator '" + *s.simulator_id + "' has two sessions for session_id '" + s.session_id +
                            "' with rank " + std::to_string(*s.rank));
        }
        const std::string sim = *s.simulator_id;
        corpus.simulated[sim].push_back(std::move(s));
    }
    return corpus;
}

PairingResult pair_sessions(const SessionCorpus& corpus, PairingMode mode) {
    PairingResult result;
    for (const auto& [simulator, sessions] : corpus.simulated) {
        // session_id -> (effective rank, input position, session)
        std::map<std::string, std::vector<std::tuple<std::int64_t, std::size_t, const Session*>>> candidates;
        for (std::size_t i = 0; i < sessions.size(); ++i) {
            const Session& s = sessions[i];
            auto& list = candidates[s.session_id];
            const auto effective = s.rank ? *s.rank : static_cast<std::int64_t>(list.size() + 1);
            list.emplace_back(effective, i, &s);
        }

        auto& pairs = result.pairs[simulator];
        std::vector<const Session*> reals;
        for (const auto& r : corpus.real) reals.push_back(&r);
        std::sort(reals.begin(), reals.end(),
                  [](const Session* a, const Session* b) { return a->session_id < b->session_id; });

        for (const Session* real : reals) {
            auto found = candidates.find(real->session_id);
            if (found == candidates.end()) {
                result.unmatched.push_back({simulator, real->session_id});
                continue;
            }
            auto list = found->second;
            std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
                return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
            });
            const std::size_t take = mode == PairingMode::OneToOne ? 1 : list.size();
            for (std::size_t i = 0; i < take; ++i) {
                const auto& [rank, pos, sim] = list[i];
                pairs.push_back({real->session_id, *real, *sim, simulator, rank});
            }
        }
    }
    return result;
}

}  // namespace qsv
