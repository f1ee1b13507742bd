#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "qsv/stats/correlation.hpp"

namespace {

namespace st = qsv::stats;
using V = std::vector<double>;
using Opt = std::vector<std::optional<double>>;

TEST(Pearson, Examples) {
    const V x{1, 4, 2, 8, 5};
    EXPECT_NEAR(*st::pearson(x, x).value, 1.0, 1e-15);
    V y;
    for (const double v : x) y.push_back(2 * v + 3);
    EXPECT_NEAR(*st::pearson(x, y).value, 1.0, 1e-15);
    EXPECT_NEAR(*st::pearson(V{1, 2, 3}, V{6, 4, 5}).value, -0.5, 1e-15);
}

TEST(Pearson, UndefinedCases) {
    const auto few = st::pearson(V{1, 2}, V{2, 1});
    EXPECT_FALSE(few.value);
    EXPECT_EQ(few.n, 2u);
    EXPECT_FALSE(few.reason.empty());
    EXPECT_FALSE(st::pearson(V{1, 1, 1}, V{1, 2, 3}).value);
    EXPECT_THROW(st::pearson(V{1, 2, 3}, V{1, 2}), std::invalid_argument);
}

TEST(Pearson, PairwiseComplete) {
    const Opt x{1, 2, std::nullopt, 3, 10};
    const Opt y{6, 4, 100, 5, std::nullopt};
    const auto c = st::pearson(x, y);
    EXPECT_EQ(c.n, 3u);
    EXPECT_NEAR(*c.value, -0.5, 1e-15);
}

TEST(Pearson, AffineInvariance) {
    std::mt19937_64 g(41);
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> a(0.1, 10.0), b(-5.0, 5.0);
    for (int t = 0; t < 200; ++t) {
        V x(30), y(30);
        for (auto& v : x) v = n(g);
        for (auto& v : y) v = n(g) + 0.5 * x[&v - y.data()];
        V tx;
        const double sa = a(g), sb = b(g);
        for (const double v : x) tx.push_back(sa * v + sb);
        EXPECT_NEAR(*st::pearson(tx, y).value, *st::pearson(x, y).value, 1e-12);
        EXPECT_NEAR(*st::pearson(x, y).value, oracle::pearson(x, y), 1e-12);
    }
}

TEST(Kendall, Examples) {
    const V x{1, 2, 3, 4, 5};
    EXPECT_EQ(*st::kendall_tau_b(x, x).value, 1.0);
    EXPECT_EQ(*st::kendall_tau_b(x, V{5, 4, 3, 2, 1}).value, -1.0);
    EXPECT_NEAR(*st::kendall_tau_b(V{1, 2, 2, 3}, V{1, 2, 3, 4}).value, 5.0 / std::sqrt(30.0), 1e-15);
}

TEST(Kendall, UndefinedCases) {
    EXPECT_FALSE(st::kendall_tau_b(V{1, 2}, V{1, 2}).value);
    EXPECT_FALSE(st::kendall_tau_b(V{3, 3, 3}, V{1, 2, 3}).value);
}

TEST(Kendall, MatchesPairCountingOracleExactly) {
    std::mt19937_64 g(42);
    std::uniform_int_distribution<std::size_t> len(3, 200);
    for (int t = 0; t < 200; ++t) {
        const auto [x, y] = gen::tied_series(g, len(g));
        const auto got = st::kendall_tau_b(x, y).value;
        const auto want = oracle::kendall_tau_b(x, y);
        ASSERT_EQ(got.has_value(), want.has_value());
        if (got) EXPECT_EQ(*got, *want);
    }
}

TEST(Kendall, MonotoneInvariance) {
    std::mt19937_64 g(43);
    for (int t = 0; t < 200; ++t) {
        const auto [x, y] = gen::tied_series(g, 50);
        V tx;
        for (const double v : x) tx.push_back(std::exp(v / 3.0) + v * v * v);
        EXPECT_EQ(st::kendall_tau_b(tx, y).value, st::kendall_tau_b(x, y).value);
    }
}

TEST(CorrelationMatrix, DuplicateColumnAndMasking) {
    st::MeasureMatrix m({"a", "a_copy", "sparse"});
    const double vals[] = {0.3, 1.7, -2.0, 4.4, 0.9};
    for (int r = 0; r < 5; ++r) {
        std::optional<double> s;
        if (r < 2) s = r;
        m.add_row({"s", "t" + std::to_string(r), 1}, {vals[r], vals[r], s});
    }
    for (const auto method : {st::CorrelationMethod::Pearson, st::CorrelationMethod::Kendall}) {
        const auto c = st::correlation_matrix(m, method);
        EXPECT_EQ(*c.at(0, 1), 1.0);
        EXPECT_EQ(*c.at(1, 0), 1.0);
        EXPECT_EQ(*c.at(0, 0), 1.0);
        EXPECT_FALSE(c.at(0, 2));
        EXPECT_FALSE(c.at(2, 2));
        EXPECT_EQ(c.count(0, 2), 2u);
        EXPECT_EQ(*c.index_of("sparse"), 2u);
    }
}

TEST(CorrelationMatrix, IndependentColumnsAreWeak) {
    std::mt19937_64 g(44);
    std::normal_distribution<double> n;
    st::MeasureMatrix m({"x", "y", "z"});
    for (int r = 0; r < 1000; ++r) m.add_row({"s", std::to_string(r), 1}, {n(g), n(g), n(g)});
    for (const auto method : {st::CorrelationMethod::Pearson, st::CorrelationMethod::Kendall}) {
        const auto c = st::correlation_matrix(m, method);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                if (i != j) EXPECT_LT(std::abs(*c.at(i, j)), 0.15);
                EXPECT_EQ(c.at(i, j), c.at(j, i));
            }
        }
    }
}

}  // namespace
