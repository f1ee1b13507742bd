#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsv/stats/measure_matrix.hpp"

namespace qsv::stats {

struct EfaOptions {
    /// Kaiser criterion (eigenvalues of R above 1) when unset.
    std::optional<int> n_factors;
    int max_iter = 1000;
    double tol = 1e-6;
    double max_missing_fraction = 0.2;
};

struct FactorSolution {
    std::vector<std::string> names;
    /// measures x factors, varimax-rotated.
    Eigen::MatrixXd loadings;
    Eigen::MatrixXd unrotated_loadings;
    std::vector<double> communalities;
    std::vector<double> uniquenesses;
    std::vector<double> explained_variance;
    /// Full spectrum of the correlation matrix, descending.
    std::vector<double> eigenvalues;
    int n_factors = 0;
    int iterations = 0;
    bool converged = false;
    std::size_t rows_used = 0;
    std::vector<std::string> dropped_columns;
    std::vector<std::string> warnings;
};

/// Principal-axis factoring on the Pearson correlation matrix with SMC
/// starting communalities, followed by varimax. Throws AnalysisError for a
/// singular correlation matrix (naming the collinear columns) or when no
/// eigenvalue exceeds 1 and n_factors is unset.
FactorSolution efa(const MeasureMatrix& m, const EfaOptions& options = {});

/// Same estimator starting from a correlation matrix.
FactorSolution efa_from_correlation(const Eigen::MatrixXd& r, const std::vector<std::string>& names,
                                    const EfaOptions& options = {});

/// Kaiser-normalized varimax via pairwise planar rotations. Stops when the
/// criterion gain drops below `tol` or after `max_sweeps`. Each factor is
/// sign-flipped so its largest-magnitude loading is positive.
Eigen::MatrixXd varimax(const Eigen::MatrixXd& loadings, int max_sweeps = 100, double tol = 1e-6);

}  // namespace qsv::stats
