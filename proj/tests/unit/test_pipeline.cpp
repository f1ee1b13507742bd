#include <regex>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

// Eigen must precede httplib, which defines _res through <resolv.h>.
#include "oracles.hpp"
#include "http_stub.hpp"
#include "qsv/errors.hpp"
#include "qsv/format.hpp"
#include "qsv/pipeline/analysis.hpp"
#include "qsv/pipeline/augment.hpp"
#include "qsv/pipeline/config.hpp"
#include "qsv/pipeline/measures.hpp"
#include "qsv/pipeline/outputs.hpp"
#include "qsv/pipeline/report.hpp"
#include "qsv/pipeline/resampling.hpp"
#include "qsv/session.hpp"
#include "temp_dir.hpp"

namespace {

namespace pl = qsv::pipeline;
namespace st = qsv::stats;
using fs_util::slurp;
using fs_util::TempDir;
using nlohmann::json;
using nlohmann::ordered_json;

const std::filesystem::path kToy = QSV_TOY_DIR;

pl::RunConfig toy_config() { return pl::load_config(kToy / "config.json"); }

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string config_error(const std::string& text) {
    try {
        pl::parse_config(ordered_json::parse(text), ".");
    } catch (const qsv::ConfigError& e) {
        return e.what();
    }
    return {};
}

TEST(Config, Defaults) {
    const auto c = pl::parse_config(ordered_json::object(), "/base");
    EXPECT_EQ(c.pairing, qsv::PairingMode::OneToOne);
    EXPECT_EQ(c.cutoff_k, 10u);
    EXPECT_EQ(c.rbo.p, 0.9);
    EXPECT_EQ(c.rbo.depth, 10u);
    EXPECT_EQ(c.bootstrap.iterations, 1000u);
    EXPECT_EQ(c.bootstrap.modes.size(), 2u);
    EXPECT_FALSE(c.heatmap);
    EXPECT_EQ(c.resolve("x.json"), std::filesystem::path("/base/x.json"));
    EXPECT_EQ(c.resolve("/abs/x.json"), std::filesystem::path("/abs/x.json"));
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
    EXPECT_NE(config_error(R"({"sead": 1})").find("unknown key 'sead'"), std::string::npos);
    EXPECT_NE(config_error(R"({"rbo": {"q": 1}})").find("config.rbo"), std::string::npos);
    EXPECT_NE(config_error(R"({"seed": -1})").find("config.seed"), std::string::npos);
    EXPECT_NE(config_error(R"({"pairing": "some"})").find("pairing"), std::string::npos);
    EXPECT_NE(config_error(R"({"measures": {"ndcg": "yes"}})").find("config.measures.ndcg"), std::string::npos);
    EXPECT_NE(config_error(R"({"embeddings": {"kind": "magic", "location": "x"}})").find("kind"), std::string::npos);
    EXPECT_NE(config_error("[]").find("object"), std::string::npos);
}

TEST(Config, LoadErrors) {
    TempDir dir("qsv_cfg");
    EXPECT_THROW(pl::load_config(dir / "missing.json"), qsv::ConfigError);
    fs_util::spit(dir / "bad.json", "{");
    EXPECT_THROW(pl::load_config(dir / "bad.json"), qsv::ConfigError);
}

TEST(Config, DigestIgnoresOutputDirOnly) {
    auto a = toy_config();
    auto b = a;
    b.out = "elsewhere";
    EXPECT_EQ(pl::config_digest(a), pl::config_digest(b));
    b.seed = a.seed + 1;
    EXPECT_NE(pl::config_digest(a), pl::config_digest(b));
    EXPECT_EQ(pl::config_digest(a).size(), 64u);
    // The canonical form parses back to the same digest.
    const auto again = pl::parse_config(pl::config_to_json(a), a.base_dir);
    EXPECT_EQ(pl::config_digest(again), pl::config_digest(a));
}

TEST(Config, MeasureDependencies) {
    pl::RunConfig c;
    c.measures["ndcg"] = true;
    try {
        pl::enabled_measures(c);
        FAIL() << "expected ConfigError";
    } catch (const qsv::ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("'ndcg'"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("qrels"), std::string::npos);
    }
    c.measures.clear();
    // Absent toggles follow the configured inputs.
    const auto auto_measures = pl::enabled_measures(c);
    EXPECT_EQ(std::count(auto_measures.begin(), auto_measures.end(), "ndcg"), 0);
    EXPECT_EQ(std::count(auto_measures.begin(), auto_measures.end(), "jaccard"), 1);
    EXPECT_EQ(std::count(auto_measures.begin(), auto_measures.end(), "rbo"), 1);
    c.measures["bogus"] = true;
    EXPECT_THROW(pl::enabled_measures(c), qsv::ConfigError);
    EXPECT_EQ(pl::enabled_measures(toy_config()), pl::measure_catalog());
}

TEST(Config, DefaultClustersCoverCatalog) {
    std::set<std::string> members;
    for (const auto& c : pl::default_clusters()) members.insert(c.members.begin(), c.members.end());
    EXPECT_EQ(members, std::set<std::string>(pl::measure_catalog().begin(), pl::measure_catalog().end()));
}

TEST(Measures, ToyRunIsDeterministic) {
    TempDir a("qsv_meas_a"), b("qsv_meas_b");
    const auto cfg = toy_config();
    const auto run = pl::run_measures(cfg, a.path());
    pl::run_measures(cfg, b.path());
    for (const char* f : {"measures.jsonl", "measures.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;

    const auto lines = lines_of(slurp(a / "measures.jsonl"));
    ASSERT_EQ(lines.size(), 2u);
    for (const auto& line : lines) {
        const auto doc = json::parse(line);
        const auto sim = doc.at("simulator_id").get<std::string>();
        const auto pairs = run.pairing.pairs.at(sim).size();
        EXPECT_EQ(pairs, 12u);
        EXPECT_EQ(doc.at("config_digest"), pl::config_digest(cfg));
        EXPECT_EQ(doc.at("session_ids").size(), pairs);
        EXPECT_EQ(doc.at("measures").size(), pl::measure_catalog().size());
        for (const auto& [name, values] : doc.at("measures").items()) EXPECT_EQ(values.size(), pairs) << name;
    }
    EXPECT_EQ(slurp(a / "measures.csv").rfind("# qsv 0.1.0 config=" + pl::config_digest(cfg), 0), 0u);
}

TEST(Measures, CsvAndJsonlAgree) {
    TempDir dir("qsv_meas_agree");
    const auto run = pl::run_measures(toy_config(), dir.path());
    const auto matrix = st::load_matrix_csv((dir / "measures.csv").string());
    EXPECT_EQ(matrix, run.matrix);
    std::size_t row = 0;
    for (const auto& line : lines_of(slurp(dir / "measures.jsonl"))) {
        const auto doc = json::parse(line);
        const auto n = doc.at("session_ids").size();
        for (std::size_t i = 0; i < n; ++i, ++row) {
            for (std::size_t c = 0; c < matrix.cols(); ++c) {
                const auto& v = doc.at("measures").at(matrix.column_names()[c]).at(i);
                const auto cell = matrix.at(row, c);
                ASSERT_EQ(v.is_null(), !cell.has_value());
                if (cell) EXPECT_EQ(v.get<double>(), *cell);
            }
        }
    }
    EXPECT_EQ(row, matrix.rows());
}

TEST(Measures, IrMetricWithoutQrelsFailsBeforeWork) {
    TempDir dir("qsv_meas_noqrels");
    auto cfg = toy_config();
    cfg.qrels.reset();
    cfg.measures["ndcg"] = true;
    const auto out = dir / "out";
    EXPECT_THROW(pl::run_measures(cfg, out), qsv::ConfigError);
    EXPECT_FALSE(std::filesystem::exists(out));
}

TEST(Measures, AllDisabledStillValid) {
    TempDir dir("qsv_meas_none");
    auto cfg = toy_config();
    for (const auto& name : pl::measure_catalog()) cfg.measures[name] = false;
    pl::run_measures(cfg, dir.path());
    const auto lines = lines_of(slurp(dir / "measures.jsonl"));
    ASSERT_EQ(lines.size(), 2u);
    for (const auto& line : lines) {
        const auto doc = json::parse(line);
        EXPECT_TRUE(doc.at("measures").empty());
        EXPECT_EQ(doc.at("session_ids").size(), 12u);
    }
}

TEST(Measures, OneToOneUsesTopCandidates) {
    auto cfg = toy_config();
    cfg.pairing = qsv::PairingMode::OneToOne;
    const auto inputs = pl::load_inputs(cfg, pl::enabled_measures(cfg));
    const auto run = pl::compute_measures(cfg, inputs, pl::enabled_measures(cfg), cfg.pairing);
    EXPECT_EQ(run.matrix.rows(), 6u);
    for (const auto& key : run.matrix.row_keys()) EXPECT_EQ(key.rank, 1);
}

TEST(Measures, MissingSessionPathsAreConfigErrors) {
    pl::RunConfig cfg;
    EXPECT_THROW(pl::load_inputs(cfg, {}), qsv::ConfigError);
}

TEST(Annotations, Parse) {
    const auto a = pl::parse_annotations(R"({"entities": {"s1": ["A", "B"]}})");
    EXPECT_EQ(a.at("s1").size(), 2u);
    EXPECT_THROW(pl::parse_annotations(R"({"entities": {"s1": [1]}})"), qsv::DataError);
    EXPECT_THROW(pl::parse_annotations("[]"), qsv::DataError);
}

pl::Dataset synthetic(const Eigen::MatrixXd& x, const std::vector<std::string>& names) {
    st::MeasureMatrix m(names);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        st::Series row;
        for (Eigen::Index c = 0; c < x.cols(); ++c) row.push_back(x(r, c));
        m.add_row({"sim", "t" + std::to_string(r), 1}, row);
    }
    return {"synthetic", m};
}

const std::vector<std::string> kEight{"ndcg", "precision", "recall", "ap", "jaccard", "cosine", "bert_score", "wordnet"};

TEST(Analysis, TwoClusterMatrixRetainsTwoFactors) {
    TempDir dir("qsv_an_two");
    const auto x = oracle::factor_model_sample(oracle::two_factor_loadings(0.8), 1000, 81);
    pl::RunConfig cfg;
    const auto bundle = pl::run_analysis({synthetic(x, kEight)}, cfg, dir.path());
    EXPECT_TRUE(bundle.failures.empty());
    ASSERT_TRUE(bundle.efa[0]);
    EXPECT_EQ(bundle.efa[0]->n_factors, 2);
    for (const char* f : {"pearson.csv", "kendall.csv", "nmi.csv", "flags.json", "efa_loadings.csv", "efa.json",
                          "cluster_averages.json", "analysis.json"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    }
    EXPECT_FALSE(std::filesystem::exists(dir / "heatmap.svg"));
    const auto clusters = json::parse(slurp(dir / "cluster_averages.json"));
    EXPECT_EQ(clusters.at("config_digest"), pl::config_digest(cfg));
}

TEST(Analysis, DuplicateColumnFailsOnlyEfa) {
    TempDir dir("qsv_an_dup");
    auto x = oracle::factor_model_sample(oracle::two_factor_loadings(0.8), 300, 82);
    x.col(1) = x.col(0);
    pl::RunConfig cfg;
    cfg.heatmap = true;
    const auto bundle = pl::run_analysis({synthetic(x, kEight)}, cfg, dir.path());
    EXPECT_EQ(*bundle.pearson[0].at(0, 1), 1.0);
    const auto rows = lines_of(slurp(dir / "pearson.csv"));
    EXPECT_EQ(qsv::split_csv_line(rows[2])[2], "1");
    ASSERT_EQ(bundle.failures.size(), 1u);
    EXPECT_EQ(bundle.failures[0].artifact, "efa_loadings.csv");
    EXPECT_NE(bundle.failures[0].message.find("ndcg~precision"), std::string::npos);
    EXPECT_FALSE(std::filesystem::exists(dir / "efa_loadings.csv"));
    for (const char* f : {"pearson.csv", "kendall.csv", "nmi.csv", "flags.json", "heatmap.svg", "cluster_averages.json"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    }
    const auto manifest = json::parse(slurp(dir / "analysis.json"));
    EXPECT_EQ(manifest.at("failures").size(), 1u);
}

TEST(Analysis, HeatmapLabelsMatchCsv) {
    TempDir dir("qsv_an_svg");
    auto x = oracle::factor_model_sample(oracle::two_factor_loadings(0.6), 200, 83);
    auto d = synthetic(x, kEight);
    pl::RunConfig cfg;
    cfg.heatmap = true;
    pl::run_analysis({d}, cfg, dir.path());
    const auto svg = slurp(dir / "heatmap.svg");
    EXPECT_NE(svg.find("config=" + pl::config_digest(cfg)), std::string::npos);
    std::vector<std::string> labels;
    const std::regex cell(R"re(text-anchor="middle" dominant-baseline="middle">([^<]*)</text>)re");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), cell); it != std::sregex_iterator(); ++it) {
        labels.push_back((*it)[1]);
    }
    std::vector<std::string> cells;
    const auto rows = lines_of(slurp(dir / "pearson.csv"));
    for (std::size_t r = 2; r < rows.size(); ++r) {
        const auto fields = qsv::split_csv_line(rows[r]);
        cells.insert(cells.end(), fields.begin() + 1, fields.end());
    }
    EXPECT_EQ(labels, cells);
    EXPECT_EQ(labels.size(), 64u);
}

TEST(Analysis, NeedsTwoColumns) {
    TempDir dir("qsv_an_one");
    st::MeasureMatrix m({"only"});
    m.add_row({"s", "t", 1}, {1.0});
    EXPECT_THROW(pl::run_analysis({{"one", m}}, pl::RunConfig{}, dir.path()), qsv::AnalysisError);
}

TEST(Analysis, SeveralDatasetsUseSubdirectories) {
    TempDir dir("qsv_an_multi");
    const auto a = synthetic(oracle::factor_model_sample(oracle::two_factor_loadings(0.8), 300, 84), kEight);
    auto b = synthetic(oracle::factor_model_sample(oracle::two_factor_loadings(0.8), 300, 85), kEight);
    b.label = "other";
    const auto bundle = pl::run_analysis({a, b}, pl::RunConfig{}, dir.path());
    EXPECT_TRUE(std::filesystem::exists(dir / "synthetic/pearson.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "other/pearson.csv"));
    ASSERT_TRUE(bundle.pearson_clusters);
    EXPECT_EQ(bundle.pearson_clusters->within[0].datasets_used, 2u);
}

TEST(Bootstrap, ZeroIterationsIsConfigError) {
    TempDir dir("qsv_bs_zero");
    auto cfg = toy_config();
    cfg.bootstrap.iterations = 0;
    EXPECT_THROW(pl::run_bootstrap(cfg, dir.path()), qsv::ConfigError);
    EXPECT_THROW(pl::run_report(cfg, dir.path()), qsv::ConfigError);
    EXPECT_FALSE(std::filesystem::exists(dir / "measures.jsonl"));
}

TEST(Bootstrap, RepeatedSeedIdenticalFile) {
    TempDir a("qsv_bs_a"), b("qsv_bs_b");
    auto cfg = toy_config();
    cfg.bootstrap.iterations = 100;
    pl::run_bootstrap(cfg, a.path());
    pl::run_bootstrap(cfg, b.path());
    EXPECT_EQ(slurp(a / "bootstrap.json"), slurp(b / "bootstrap.json"));
    const auto doc = json::parse(slurp(a / "bootstrap.json"));
    EXPECT_EQ(doc.at("reports").size(), 2u);
    EXPECT_EQ(doc.at("reports")[0].at("seed"), cfg.seed);
}

TEST(Bootstrap, SingleCandidatePerTopicGivesZeros) {
    TempDir dir("qsv_bs_single");
    auto sims = qsv::load_sessions((kToy / "simulated.json").string(), qsv::SessionKind::Simulated);
    std::set<std::pair<std::string, std::string>> seen;
    std::erase_if(sims, [&](const qsv::Session& s) { return !seen.insert({*s.simulator_id, s.session_id}).second; });
    ASSERT_EQ(sims.size(), 6u);
    fs_util::spit(dir / "single.json", qsv::serialize_sessions(sims));
    auto cfg = toy_config();
    cfg.simulated = (dir / "single.json").string();
    cfg.bootstrap.iterations = 50;
    cfg.bootstrap.modes = {st::BootstrapMode::WithinSimulator};
    const auto reports = pl::run_bootstrap(cfg, dir.path());
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_TRUE(reports[0].degenerate);
    for (const auto& m : reports[0].methods) EXPECT_EQ(m.max_abs_deviation, 0.0);
}

std::vector<qsv::Session> sessions_with_serps(const std::vector<std::vector<std::string>>& serps) {
    std::vector<qsv::Session> out;
    for (std::size_t i = 0; i < serps.size(); ++i) {
        qsv::Session s;
        s.session_id = "t" + std::to_string(i);
        s.id = "r" + std::to_string(i);
        s.interactions.push_back({"query " + std::to_string(i), serps[i], std::nullopt, false});
        out.push_back(s);
    }
    return out;
}

void search_handler(const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    json ids = json::array();
    for (int i = 0; i < 15; ++i) ids.push_back(body.at("query").get<std::string>() + "#" + std::to_string(i));
    res.set_content(json{{"doc_ids", ids}}.dump(), "application/json");
}

pl::AugmentOptions options_for(const stub::Server& server, std::size_t k) {
    pl::AugmentOptions o;
    o.endpoint = server.url("/search");
    o.k = k;
    o.retry.initial_backoff = std::chrono::milliseconds(1);
    o.retry.max_attempts = 2;
    return o;
}

TEST(Augment, ExistingSerpsUntouched) {
    stub::Server server(search_handler);
    const auto input = sessions_with_serps({{"a"}, {"b", "c"}});
    const auto r = pl::augment_serps(input, options_for(server, 10));
    EXPECT_EQ(r.requests, 0u);
    EXPECT_EQ(server.requests(), 0);
    EXPECT_EQ(r.sessions, input);
}

TEST(Augment, FillsEmptySerps) {
    stub::Server server([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"doc_ids": ["d1", "d2"]})", "application/json");
    });
    const auto r = pl::augment_serps(sessions_with_serps({{}, {"x"}}), options_for(server, 10));
    EXPECT_EQ(r.sessions[0].serp(), (std::vector<std::string>{"d1", "d2"}));
    EXPECT_TRUE(r.sessions[0].interactions[0].augmented);
    EXPECT_FALSE(r.sessions[1].interactions[0].augmented);
    EXPECT_EQ(server.requests(), 1);
}

TEST(Augment, ConcurrentRequestsKeepOrderAndTruncate) {
    stub::Server server(search_handler);
    auto opts = options_for(server, 5);
    opts.concurrency = 4;
    const auto r = pl::augment_serps(sessions_with_serps(std::vector<std::vector<std::string>>(20)), opts);
    EXPECT_EQ(server.requests(), 20);
    for (std::size_t i = 0; i < r.sessions.size(); ++i) {
        ASSERT_EQ(r.sessions[i].serp().size(), 5u);
        EXPECT_EQ(r.sessions[i].serp()[0], "query " + std::to_string(i) + "#0");
    }
}

TEST(Augment, DuplicateIdsRemoveOutput) {
    TempDir dir("qsv_aug_dup");
    stub::Server server([](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"doc_ids": ["d1", "d1"]})", "application/json");
    });
    fs_util::spit(dir / "in.json", qsv::serialize_sessions(sessions_with_serps({{}})));
    try {
        pl::augment_file(dir / "in.json", qsv::SessionKind::Real, dir / "out.json", options_for(server, 10));
        FAIL() << "expected DataError";
    } catch (const qsv::DataError& e) {
        EXPECT_NE(std::string(e.what()).find("duplicate in SERP"), std::string::npos);
    }
    EXPECT_FALSE(std::filesystem::exists(dir / "out.json"));
    EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir.path()), std::filesystem::directory_iterator()), 1);
}

TEST(Augment, TransportFailureAfterRetries) {
    TempDir dir("qsv_aug_down");
    stub::Server server([](const httplib::Request&, httplib::Response& res) { res.status = 502; });
    fs_util::spit(dir / "in.json", qsv::serialize_sessions(sessions_with_serps({{}})));
    EXPECT_THROW(pl::augment_file(dir / "in.json", qsv::SessionKind::Real, dir / "out.json", options_for(server, 10)),
                 qsv::DataError);
    EXPECT_EQ(server.requests(), 2);
    EXPECT_FALSE(std::filesystem::exists(dir / "out.json"));
}

TEST(Augment, RoundTripsMarker) {
    TempDir dir("qsv_aug_file");
    stub::Server server(search_handler);
    fs_util::spit(dir / "in.json", qsv::serialize_sessions(sessions_with_serps({{}, {"keep"}})));
    pl::augment_file(dir / "in.json", qsv::SessionKind::Real, dir / "out.json", options_for(server, 3));
    const auto back = qsv::load_sessions((dir / "out.json").string(), qsv::SessionKind::Real);
    EXPECT_TRUE(back[0].interactions[0].augmented);
    EXPECT_EQ(back[0].serp().size(), 3u);
    EXPECT_EQ(back[1].serp(), std::vector<std::string>{"keep"});
    const auto raw = json::parse(slurp(dir / "out.json"));
    EXPECT_FALSE(raw.at("sessions")[1].at("interactions")[0].contains("augmented"));
}

TEST(Report, WritesEveryArtifactDeterministically) {
    TempDir a("qsv_rep_a"), b("qsv_rep_b");
    auto cfg = toy_config();
    cfg.bootstrap.iterations = 100;
    pl::run_report(cfg, a.path());
    pl::run_report(cfg, b.path());
    for (const char* f : {"measures.jsonl", "measures.csv", "pearson.csv", "kendall.csv", "nmi.csv", "flags.json",
                          "efa_loadings.csv", "efa.json", "cluster_averages.json", "analysis.json", "bootstrap.json",
                          "heatmap.svg"}) {
        ASSERT_TRUE(std::filesystem::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
        EXPECT_NE(slurp(a / f).find(pl::config_digest(cfg)), std::string::npos) << f;
    }
}

TEST(Outputs, AtomicWriteLeavesNoTemporaries) {
    TempDir dir("qsv_atomic");
    pl::write_file_atomic(dir / "nested/file.txt", "one");
    pl::write_file_atomic(dir / "nested/file.txt", "two");
    EXPECT_EQ(slurp(dir / "nested/file.txt"), "two");
    EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir / "nested"), std::filesystem::directory_iterator()), 1);
}

}  // namespace
