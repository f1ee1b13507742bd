#include <random>
#include <set>

#include <gtest/gtest.h>

#include "qsv/errors.hpp"
#include "qsv/session.hpp"

namespace {

using qsv::Session;
using qsv::SessionKind;

Session make(std::string session_id, std::string id, std::string query, std::optional<std::string> sim = std::nullopt,
             std::optional<std::int64_t> rank = std::nullopt) {
    Session s;
    s.session_id = std::move(session_id);
    s.id = std::move(id);
    s.simulator_id = std::move(sim);
    s.rank = rank;
    s.interactions.push_back({std::move(query), {"d1", "d2"}, std::nullopt, false});
    return s;
}

std::string error_of(std::string_view raw, SessionKind kind) {
    try {
        qsv::parse_sessions(raw, kind);
    } catch (const qsv::DataError& e) {
        return e.what();
    }
    return {};
}

TEST(ParseSessions, EmptyArray) {
    EXPECT_TRUE(qsv::parse_sessions(R"({"sessions": []})", SessionKind::Real).empty());
}

TEST(ParseSessions, MinimalSession) {
    const auto s = qsv::parse_sessions(
        R"({"sessions": [{"session_id": "t1", "id": "r1", "interactions": [{"query": "q", "serp": ["a"]}]}]})",
        SessionKind::Real);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_FALSE(s[0].rank.has_value());
    EXPECT_EQ(s[0].query(), "q");
    EXPECT_EQ(s[0].serp(), std::vector<std::string>{"a"});
    EXPECT_FALSE(s[0].interactions[0].clicked_doc_ids.has_value());
}

TEST(ParseSessions, RankZeroRejected) {
    const auto msg = error_of(
        R"({"sessions": [{"session_id": "t1", "id": "s1", "simulator_id": "x", "rank": 0,
            "interactions": [{"query": "q", "serp": []}]}]})",
        SessionKind::Simulated);
    EXPECT_NE(msg.find("rank must be"), std::string::npos) << msg;
    EXPECT_NE(msg.find("sessions[0].rank"), std::string::npos) << msg;
}

TEST(ParseSessions, SchemaViolationsCarryPath) {
    EXPECT_NE(error_of(R"({"sessions": [{"id": "x", "interactions": []}]})", SessionKind::Real).find("session_id"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"sessions": [{"session_id": "t", "id": "x", "interactions": []}]})", SessionKind::Real)
                  .find("at least one interaction"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"sessions": [{"session_id": "t", "id": "x",
                  "interactions": [{"query": "q", "serp": ["a", "a"]}]}]})",
                       SessionKind::Real)
                  .find("duplicate"),
              std::string::npos);
    EXPECT_NE(error_of(R"({"sessions": [{"session_id": "t", "id": "x",
                  "interactions": [{"query": "q", "serp": ["a"], "clicked_doc_ids": ["b"]}]}]})",
                       SessionKind::Real)
                  .find("not in serp"),
              std::string::npos);
    EXPECT_NE(error_of("{not json", SessionKind::Real).find("malformed JSON"), std::string::npos);
}

TEST(BuildCorpus, Empty) {
    const auto c = qsv::build_corpus({}, {});
    EXPECT_TRUE(c.real.empty());
    EXPECT_TRUE(c.simulated.empty());
}

TEST(BuildCorpus, GroupsBySimulator) {
    const auto c = qsv::build_corpus({make("t1", "r1", "a"), make("t2", "r2", "b")},
                                     {make("t1", "s1", "a", "sim"), make("t1", "s2", "b", "sim"),
                                      make("t2", "s3", "c", "sim")});
    ASSERT_EQ(c.simulated.size(), 1u);
    EXPECT_EQ(c.simulated.at("sim").size(), 3u);
}

TEST(BuildCorpus, DuplicateRealSessionRejected) {
    EXPECT_THROW(qsv::build_corpus({make("t1", "r1", "a"), make("t1", "r2", "b")}, {}), qsv::DataError);
}

TEST(BuildCorpus, SimulatedNeedsSimulatorId) {
    EXPECT_THROW(qsv::build_corpus({}, {make("t1", "s1", "a")}), qsv::DataError);
}

TEST(PairSessions, OneToOneUsesMinimumRank) {
    const auto c = qsv::build_corpus({make("t1", "r1", "real")},
                                     {make("t1", "s2", "second", "sim", 2), make("t1", "s1", "first", "sim", 1)});
    const auto r = qsv::pair_sessions(c, qsv::PairingMode::OneToOne);
    ASSERT_EQ(r.pairs.at("sim").size(), 1u);
    EXPECT_EQ(r.pairs.at("sim")[0].simulated.id, "s1");
    EXPECT_EQ(r.pairs.at("sim")[0].effective_rank, 1);
}

TEST(PairSessions, OneToManyKeepsEveryCandidate) {
    const auto c = qsv::build_corpus({make("t1", "r1", "real")}, {make("t1", "a", "x", "sim"), make("t1", "b", "y", "sim"),
                                                                 make("t1", "c", "z", "sim")});
    const auto r = qsv::pair_sessions(c, qsv::PairingMode::OneToMany);
    ASSERT_EQ(r.pairs.at("sim").size(), 3u);
    // Without ranks, input order decides.
    EXPECT_EQ(r.pairs.at("sim")[0].simulated.id, "a");
    EXPECT_EQ(r.pairs.at("sim")[2].effective_rank, 3);
}

TEST(PairSessions, UnmatchedRealIsReported) {
    const auto c = qsv::build_corpus({make("t1", "r1", "q"), make("t9", "r9", "q")}, {make("t1", "s", "x", "sim")});
    const auto r = qsv::pair_sessions(c, qsv::PairingMode::OneToOne);
    EXPECT_EQ(r.pairs.at("sim").size(), 1u);
    ASSERT_EQ(r.unmatched.size(), 1u);
    EXPECT_EQ(r.unmatched[0].session_id, "t9");
}

TEST(PairSessions, RealWithoutAnySimulatorYieldsNoPairs) {
    const auto c = qsv::build_corpus({make("t1", "r1", "q")}, {});
    const auto r = qsv::pair_sessions(c, qsv::PairingMode::OneToOne);
    EXPECT_TRUE(r.pairs.empty());
}

TEST(PairingMode, ParseAndPrint) {
    EXPECT_EQ(qsv::parse_pairing_mode("one-to-many"), qsv::PairingMode::OneToMany);
    EXPECT_EQ(qsv::to_string(qsv::PairingMode::OneToOne), "one-to-one");
    EXPECT_THROW(qsv::parse_pairing_mode("many"), qsv::ConfigError);
}

// Random corpora for the pairing and round-trip properties.
struct RandomCorpus {
    std::vector<Session> real;
    std::vector<Session> simulated;
};

RandomCorpus random_corpus(std::mt19937_64& gen) {
    RandomCorpus out;
    std::uniform_int_distribution<int> topics(0, 6), count(0, 4), coin(0, 1);
    const int n_real = topics(gen);
    for (int t = 0; t < n_real; ++t) out.real.push_back(make("t" + std::to_string(t), "r" + std::to_string(t), "q"));
    for (const std::string sim : {"a", "b"}) {
        for (int t = 0; t < 8; ++t) {
            const int n = count(gen);
            for (int i = 0; i < n; ++i) {
                std::optional<std::int64_t> rank;
                if (coin(gen)) rank = i + 1;
                auto s = make("t" + std::to_string(t), sim + std::to_string(t) + "_" + std::to_string(i),
                              "query " + std::to_string(i), sim, rank);
                if (coin(gen)) s.interactions[0].clicked_doc_ids = std::vector<std::string>{"d2"};
                if (coin(gen)) s.interactions.push_back({"follow up", {}, std::nullopt, true});
                out.simulated.push_back(std::move(s));
            }
        }
    }
    return out;
}

TEST(PairSessions, PropertiesOnRandomCorpora) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto rc = random_corpus(gen);
        const auto corpus = qsv::build_corpus(rc.real, rc.simulated);
        std::set<std::string> real_ids;
        for (const auto& r : rc.real) real_ids.insert(r.session_id);

        const auto one = qsv::pair_sessions(corpus, qsv::PairingMode::OneToOne);
        const auto many = qsv::pair_sessions(corpus, qsv::PairingMode::OneToMany);
        for (const auto& [sim, sessions] : corpus.simulated) {
            std::size_t matching = 0;
            for (const auto& s : sessions) matching += real_ids.contains(s.session_id);
            EXPECT_LE(one.pairs.at(sim).size(), rc.real.size());
            EXPECT_EQ(many.pairs.at(sim).size(), matching);
            for (const auto* result : {&one, &many}) {
                for (const auto& p : result->pairs.at(sim)) {
                    EXPECT_EQ(p.real.session_id, p.simulated.session_id);
                    EXPECT_EQ(p.session_id, p.real.session_id);
                }
            }
        }
    }
}

TEST(SerializeSessions, RoundTrip) {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto rc = random_corpus(gen);
        const auto text = qsv::serialize_sessions(rc.simulated);
        EXPECT_EQ(qsv::parse_sessions(text, SessionKind::Simulated), rc.simulated);
        const auto real_text = qsv::serialize_sessions(rc.real);
        EXPECT_EQ(qsv::parse_sessions(real_text, SessionKind::Real), rc.real);
    }
}

TEST(SerializeSessions, NonAsciiQueriesSurvive) {
    std::vector<Session> s{make("t1", "r1", "caf\xc3\xa9 \xe6\x9d\xb1\xe4\xba\xac")};
    EXPECT_EQ(qsv::parse_sessions(qsv::serialize_sessions(s), SessionKind::Real), s);
}

}  // namespace
