#pragma once

#include <Eigen/Dense>

#include <string>

namespace selfisbi {

/// Column means of `samples` (one sample per row).
Eigen::VectorXd sample_mean(const Eigen::MatrixXd& samples);

/// Unbiased sample covariance (divisor n - 1). Throws InsufficientData for n < 2.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& samples);

struct ShrinkageResult {
    Eigen::MatrixXd covariance;
    double intensity = 0.0;  // weight on the diagonal target, in [0, 1]
};

/// Ledoit-Wolf shrinkage of the unbiased sample covariance toward its own diagonal,
/// with the intensity estimated from the variance of the sample outer products.
ShrinkageResult ledoit_wolf_diagonal(const Eigen::MatrixXd& samples);

double smallest_eigenvalue(const Eigen::MatrixXd& m);

/// Cholesky factor of a symmetric positive-definite matrix; throws SingularMatrix
/// (with the smallest eigenvalue) when the factorization fails.
Eigen::LLT<Eigen::MatrixXd> spd_factor(const Eigen::MatrixXd& m, const std::string& what);

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

}  // namespace selfisbi
