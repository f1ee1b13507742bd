#include "qsv/stats/factor_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qsv/errors.hpp"

namespace qsv::stats {

namespace {

// Largest-magnitude loading of each factor made positive.
void fix_signs(Eigen::MatrixXd& loadings) {
    for (Eigen::Index c = 0; c < loadings.cols(); ++c) {
        Eigen::Index arg = 0;
        loadings.col(c).cwiseAbs().maxCoeff(&arg);
        if (loadings(arg, c) < 0) loadings.col(c) *= -1.0;
    }
}

double varimax_criterion(const Eigen::MatrixXd& a) {
    const auto p = static_cast<double>(a.rows());
    double v = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const Eigen::ArrayXd sq = a.col(c).array().square();
        v += (p * sq.square().sum() - sq.sum() * sq.sum()) / (p * p);
    }
    return v;
}

struct Spectrum {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // matching columns
};

Spectrum descending_eigen(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw AnalysisError("eigendecomposition failed");
    return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

[[noreturn]] void singular(const Eigen::MatrixXd& r, const Spectrum& spectrum, const std::vector<std::string>& names) {
    std::vector<std::string> culprits;
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < r.cols(); ++j) {
            if (std::abs(r(i, j)) > 1.0 - 1e-8) {
                culprits.push_back(names[static_cast<std::size_t>(i)] + "~" + names[static_cast<std::size_t>(j)]);
            }
        }
    }
    if (culprits.empty()) {
        const Eigen::VectorXd null_dir = spectrum.vectors.col(spectrum.vectors.cols() - 1);
        for (Eigen::Index i = 0; i < null_dir.size(); ++i) {
            if (std::abs(null_dir(i)) > 0.1) culprits.push_back(names[static_cast<std::size_t>(i)]);
        }
    }
    std::ostringstream msg;
    msg << "correlation matrix is singular; collinear columns:";
    for (const auto& c : culprits) msg << ' ' << c;
    throw AnalysisError(msg.str());
}

}  // namespace

Eigen::MatrixXd varimax(const Eigen::MatrixXd& loadings, int max_sweeps, double tol) {
    Eigen::MatrixXd a = loadings;
    if (a.cols() < 2) {
        fix_signs(a);
        return a;
    }
    const Eigen::Index p = a.rows();
    Eigen::VectorXd h = a.rowwise().norm();
    for (Eigen::Index i = 0; i < p; ++i) {
        if (h(i) > 0) a.row(i) /= h(i);
    }

    const auto pd = static_cast<double>(p);
    double criterion = varimax_criterion(a);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (Eigen::Index j = 0; j < a.cols() - 1; ++j) {
            for (Eigen::Index k = j + 1; k < a.cols(); ++k) {
                const Eigen::ArrayXd x = a.col(j).array();
                const Eigen::ArrayXd y = a.col(k).array();
                const Eigen::ArrayXd u = x.square() - y.square();
                const Eigen::ArrayXd v = 2.0 * x * y;
                const double sa = u.sum();
                const double sb = v.sum();
                const double sc = (u.square() - v.square()).sum();
                const double sd = 2.0 * (u * v).sum();
                const double num = sd - 2.0 * sa * sb / pd;
                const double den = sc - (sa * sa - sb * sb) / pd;
                const double phi = std::atan2(num, den) / 4.0;
                if (phi == 0.0) continue;
                const double c = std::cos(phi);
                const double s = std::sin(phi);
                a.col(j) = (c * x + s * y).matrix();
                a.col(k) = (-s * x + c * y).matrix();
            }
        }
        const double next = varimax_criterion(a);
        const double gain = next - criterion;
        criterion = next;
        if (gain < tol) break;
    }

    for (Eigen::Index i = 0; i < p; ++i) a.row(i) *= h(i);
    fix_signs(a);
    return a;
}

FactorSolution efa_from_correlation(const Eigen::MatrixXd& r, const std::vector<std::string>& names,
                                    const EfaOptions& options) {
    const Eigen::Index p = r.rows();
    if (p < 2 || r.cols() != p || static_cast<std::size_t>(p) != names.size()) {
        throw AnalysisError("factor analysis needs a square correlation matrix over at least 2 measures");
    }

    FactorSolution out;
    out.names = names;
    const Spectrum spectrum = descending_eigen(r);
    out.eigenvalues.assign(spectrum.values.data(), spectrum.values.data() + p);
    if (spectrum.values(p - 1) < 1e-10 * std::max(1.0, spectrum.values(0))) singular(r, spectrum, names);

    int m = 0;
    if (options.n_factors) {
        m = *options.n_factors;
        if (m < 1 || m > p) throw AnalysisError("n_factors must lie in [1, number of measures]");
    } else {
        for (const double e : out.eigenvalues) m += e > 1.0;
        if (m == 0) throw AnalysisError("no eigenvalue of the correlation matrix exceeds 1 (Kaiser criterion)");
    }
    out.n_factors = m;

    // Squared multiple correlations as starting communalities.
    const Eigen::MatrixXd inverse = r.inverse();
    Eigen::VectorXd h(p);
    for (Eigen::Index i = 0; i < p; ++i) h(i) = std::clamp(1.0 - 1.0 / inverse(i, i), 0.0, 1.0);

    Eigen::MatrixXd loadings(p, m);
    bool heywood = false;
    for (int iter = 1; iter <= options.max_iter; ++iter) {
        Eigen::MatrixXd reduced = r;
        reduced.diagonal() = h;
        const Spectrum s = descending_eigen(reduced);
        for (int f = 0; f < m; ++f) {
            loadings.col(f) = s.vectors.col(f) * std::sqrt(std::max(s.values(f), 0.0));
        }
        Eigen::VectorXd next = loadings.rowwise().squaredNorm();
        for (Eigen::Index i = 0; i < p; ++i) {
            if (next(i) > 1.0) {
                next(i) = 1.0;
                heywood = true;
            }
        }
        const double change = (next - h).cwiseAbs().maxCoeff();
        h = next;
        out.iterations = iter;
        if (change < options.tol) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged) out.warnings.push_back("principal-axis iteration did not converge");
    if (heywood) out.warnings.push_back("communality above 1 clamped (Heywood case)");

    fix_signs(loadings);
    out.unrotated_loadings = loadings;
    out.loadings = varimax(loadings);

    for (Eigen::Index i = 0; i < p; ++i) {
        const double communality = out.loadings.row(i).squaredNorm();
        out.communalities.push_back(communality);
        out.uniquenesses.push_back(std::clamp(1.0 - communality, 0.0, 1.0));
    }
    for (int f = 0; f < m; ++f) out.explained_variance.push_back(out.loadings.col(f).squaredNorm());
    return out;
}

FactorSolution efa(const MeasureMatrix& m, const EfaOptions& options) {
    std::vector<std::size_t> keep;
    std::vector<std::string> dropped;
    std::vector<std::string> warnings;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        std::size_t missing = 0;
        for (std::size_t r = 0; r < m.rows(); ++r) missing += !m.at(r, c);
        const double fraction = m.rows() == 0 ? 1.0 : static_cast<double>(missing) / static_cast<double>(m.rows());
        if (fraction > options.max_missing_fraction) {
            dropped.push_back(m.column_names()[c]);
            warnings.push_back("dropped '" + m.column_names()[c] + "': " + std::to_string(missing) + " of " +
                               std::to_string(m.rows()) + " values missing");
        } else {
            keep.push_back(c);
        }
    }

    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (std::all_of(keep.begin(), keep.end(), [&](std::size_t c) { return m.at(r, c).has_value(); })) {
            rows.push_back(r);
        }
    }

    // Constant columns have no correlation structure.
    std::vector<std::size_t> usable;
    for (const std::size_t c : keep) {
        bool constant = true;
        for (const std::size_t r : rows) constant = constant && *m.at(r, c) == *m.at(rows.front(), c);
        if (rows.empty() || constant) {
            dropped.push_back(m.column_names()[c]);
            warnings.push_back("dropped '" + m.column_names()[c] + "': constant over complete rows");
        } else {
            usable.push_back(c);
        }
    }
    if (usable.size() < 2) throw AnalysisError("factor analysis needs at least 2 usable measures");
    if (rows.size() < 3) throw AnalysisError("factor analysis needs at least 3 complete rows");
    if (rows.size() < 5 * usable.size()) {
        warnings.push_back("only " + std::to_string(rows.size()) + " complete rows for " + std::to_string(usable.size()) +
                           " measures (fewer than 5 per measure)");
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(usable.size());
    Eigen::MatrixXd z(n, p);
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < p; ++j) {
        const std::size_t c = usable[static_cast<std::size_t>(j)];
        names.push_back(m.column_names()[c]);
        for (Eigen::Index i = 0; i < n; ++i) z(i, j) = *m.at(rows[static_cast<std::size_t>(i)], c);
    }
    const Eigen::RowVectorXd mean = z.colwise().mean();
    z.rowwise() -= mean;
    const Eigen::RowVectorXd sd = (z.colwise().squaredNorm() / static_cast<double>(n - 1)).cwiseSqrt();
    for (Eigen::Index j = 0; j < p; ++j) z.col(j) /= sd(j);
    Eigen::MatrixXd r = (z.transpose() * z) / static_cast<double>(n - 1);
    r.diagonal().setOnes();

    FactorSolution out = efa_from_correlation(r, names, options);
    out.rows_used = rows.size();
    out.dropped_columns = std::move(dropped);
    warnings.insert(warnings.end(), out.warnings.begin(), out.warnings.end());
    out.warnings = std::move(warnings);
    return out;
}

}  // namespace qsv::stats
