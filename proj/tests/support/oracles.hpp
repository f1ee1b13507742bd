#pragma once
// Reference implementations written directly from the textbook definitions.
// They favour clarity over speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Grades = std::map<std::string, int>;  // one topic's judgments

inline int grade_of(const Grades& g, const std::string& doc) {
    const auto it = g.find(doc);
    return it == g.end() ? 0 : std::max(it->second, 0);
}

inline int total_relevant(const Grades& g) {
    int n = 0;
    for (const auto& [doc, grade] : g) n += grade >= 1;
    return n;
}

inline double precision_at_k(const std::vector<std::string>& run, const Grades& g, std::size_t k) {
    int hits = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (i < run.size() && grade_of(g, run[i]) >= 1) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

inline std::optional<double> recall_at_k(const std::vector<std::string>& run, const Grades& g, std::size_t k) {
    const int rel = total_relevant(g);
    if (rel == 0) return std::nullopt;
    int hits = 0;
    for (std::size_t i = 0; i < std::min(k, run.size()); ++i) hits += grade_of(g, run[i]) >= 1;
    return static_cast<double>(hits) / static_cast<double>(rel);
}

inline double reciprocal_rank(const std::vector<std::string>& run, const Grades& g) {
    for (std::size_t i = 0; i < run.size(); ++i) {
        if (grade_of(g, run[i]) >= 1) return 1.0 / static_cast<double>(i + 1);
    }
    return 0.0;
}

// Mean over every relevant judged document of the precision at its rank,
// zero for relevant documents that were not retrieved.
inline std::optional<double> average_precision(const std::vector<std::string>& run, const Grades& g) {
    const int rel = total_relevant(g);
    if (rel == 0) return std::nullopt;
    double sum = 0.0;
    for (const auto& [doc, grade] : g) {
        if (grade < 1) continue;
        const auto pos = std::find(run.begin(), run.end(), doc);
        if (pos == run.end()) continue;
        const auto rank = static_cast<std::size_t>(pos - run.begin()) + 1;
        sum += precision_at_k(run, g, rank);
    }
    return sum / rel;
}

inline std::optional<double> ndcg_at_k(const std::vector<std::string>& run, const Grades& g, std::size_t k) {
    std::vector<int> ideal;
    for (const auto& [doc, grade] : g) {
        if (grade > 0) ideal.push_back(grade);
    }
    if (ideal.empty()) return std::nullopt;
    std::sort(ideal.rbegin(), ideal.rend());
    double dcg = 0.0;
    double idcg = 0.0;
    for (std::size_t i = 1; i <= k; ++i) {
        const double discount = std::log2(static_cast<double>(i) + 1.0);
        if (i <= run.size()) dcg += grade_of(g, run[i - 1]) / discount;
        if (i <= ideal.size()) idcg += ideal[i - 1] / discount;
    }
    return dcg / idcg;
}

// Extrapolated RBO: agreement at depths 1..k from explicit prefix set
// intersections, and the tail d > k summed in closed form assuming the
// agreement stays at X_k / k.
inline double rbo_extrapolated(const std::vector<std::string>& a, const std::vector<std::string>& b, double p,
                               std::size_t depth) {
    const std::size_t k = std::min({depth, a.size(), b.size()});
    double head = 0.0;
    double agreement_k = 0.0;
    for (std::size_t d = 1; d <= k; ++d) {
        const std::set<std::string> pa(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(d));
        const std::set<std::string> pb(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(d));
        std::size_t common = 0;
        for (const auto& x : pa) common += pb.count(x);
        const double agreement = static_cast<double>(common) / static_cast<double>(d);
        head += std::pow(p, static_cast<double>(d - 1)) * agreement;
        agreement_k = agreement;
    }
    // (1-p) * sum_{d>k} p^(d-1) * A_k = A_k * p^k
    return (1.0 - p) * head + agreement_k * std::pow(p, static_cast<double>(k));
}

// Explicit O(n^2) pair counting for Kendall's tau-b.
inline std::optional<double> kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 3) return std::nullopt;
    std::int64_t concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0) ++tied_x;
            if (dy == 0) ++tied_y;
            if (dx == 0 || dy == 0) continue;
            if ((dx > 0) == (dy > 0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const auto n0 = static_cast<std::int64_t>(n * (n - 1) / 2);
    if (n0 == tied_x || n0 == tied_y) return std::nullopt;
    return static_cast<double>(concordant - discordant) /
           std::sqrt(static_cast<double>(n0 - tied_x) * static_cast<double>(n0 - tied_y));
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double cxy = 0, cxx = 0, cyy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cxy += (x[i] - mx) * (y[i] - my);
        cxx += (x[i] - mx) * (x[i] - mx);
        cyy += (y[i] - my) * (y[i] - my);
    }
    return cxy / std::sqrt(cxx * cyy);
}

// Raw varimax criterion on Kaiser-normalized loadings.
inline double varimax_criterion(const Eigen::MatrixXd& loadings) {
    Eigen::MatrixXd a = loadings;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double h = a.row(i).norm();
        if (h > 0) a.row(i) /= h;
    }
    const double p = static_cast<double>(a.rows());
    double total = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        double s2 = 0, s4 = 0;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const double sq = a(i, j) * a(i, j);
            s2 += sq;
            s4 += sq * sq;
        }
        total += s4 / p - (s2 / p) * (s2 / p);
    }
    return total;
}

inline double tucker_congruence(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
}

// Best mean absolute congruence over all column permutations of `found`
// against `truth` (signs ignored). Returns the per-factor congruences of the
// best assignment.
inline std::vector<double> matched_congruences(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& found) {
    std::vector<int> perm(static_cast<std::size_t>(found.cols()));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    std::vector<double> best;
    double best_sum = -1.0;
    do {
        std::vector<double> cur;
        double sum = 0.0;
        for (Eigen::Index j = 0; j < truth.cols(); ++j) {
            const double c = std::abs(tucker_congruence(truth.col(j), found.col(perm[static_cast<std::size_t>(j)])));
            cur.push_back(c);
            sum += c;
        }
        if (sum > best_sum) {
            best_sum = sum;
            best = cur;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Standard normal draws by Box-Muller over mt19937_64, independent of the
// standard library's distribution implementations.
class Normal {
public:
    explicit Normal(std::uint64_t seed) : engine_(seed) {}
    double operator()() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

// Rows x = Lambda f + e with f ~ N(0, I) and e_i ~ N(0, 1 - h_i), so every
// variable has unit variance.
inline Eigen::MatrixXd factor_model_sample(const Eigen::MatrixXd& loadings, std::size_t n, std::uint64_t seed) {
    Normal normal(seed);
    const Eigen::Index p = loadings.rows();
    const Eigen::Index m = loadings.cols();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), p);
    Eigen::VectorXd f(m);
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n); ++r) {
        for (Eigen::Index j = 0; j < m; ++j) f(j) = normal();
        for (Eigen::Index i = 0; i < p; ++i) {
            const double unique_sd = std::sqrt(std::max(0.0, 1.0 - loadings.row(i).squaredNorm()));
            x(r, i) = loadings.row(i).dot(f) + unique_sd * normal();
        }
    }
    return x;
}

// Loadings of the 2-factor, 8-measure model: 4 measures per factor at
// `strength`, zero cross-loadings.
inline Eigen::MatrixXd two_factor_loadings(double strength) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(8, 2);
    for (int i = 0; i < 4; ++i) l(i, 0) = strength;
    for (int i = 4; i < 8; ++i) l(i, 1) = strength;
    return l;
}

}  // namespace oracle
