#include "selfisbi/covariance.hpp"

#include "selfisbi/errors.hpp"

#include <algorithm>

namespace selfisbi {

Eigen::VectorXd sample_mean(const Eigen::MatrixXd& samples) {
    if (samples.rows() < 1) throw InsufficientData("sample mean needs at least one sample");
    return samples.colwise().mean().transpose();
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& samples) {
    const Eigen::Index n = samples.rows();
    if (n < 2) throw InsufficientData("sample covariance needs at least two samples");
    const Eigen::MatrixXd centered = samples.rowwise() - samples.colwise().mean();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    return symmetrized(cov);
}

ShrinkageResult ledoit_wolf_diagonal(const Eigen::MatrixXd& samples) {
    const Eigen::Index n = samples.rows();
    const Eigen::Index p = samples.cols();
    if (n < 2) throw InsufficientData("covariance shrinkage needs at least two samples");
    const Eigen::MatrixXd xc = samples.rowwise() - samples.colwise().mean();
    const double dn = static_cast<double>(n);
    const Eigen::MatrixXd biased = symmetrized(xc.transpose() * xc / dn);

    // pi_off: summed variance of the off-diagonal outer-product entries.
    double pi_off = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::VectorXd x = xc.row(k).transpose();
        for (Eigen::Index j = 0; j < p; ++j) {
            for (Eigen::Index i = 0; i < p; ++i) {
                if (i == j) continue;
                const double d = x[i] * x[j] - biased(i, j);
                pi_off += d * d;
            }
        }
    }
    pi_off /= dn;
    double gamma = (biased.array().square()).sum() - biased.diagonal().array().square().sum();

    ShrinkageResult out;
    out.intensity = gamma > 0.0 ? std::clamp(pi_off / gamma / dn, 0.0, 1.0) : 1.0;
    const Eigen::MatrixXd unbiased = biased * (dn / (dn - 1.0));
    out.covariance = (1.0 - out.intensity) * unbiased;
    out.covariance.diagonal() = unbiased.diagonal();
    return out;
}

double smallest_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrized(m), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

Eigen::LLT<Eigen::MatrixXd> spd_factor(const Eigen::MatrixXd& m, const std::string& what) {
    if (m.rows() != m.cols()) throw DimensionError(what + " is not square");
    if (!m.allFinite()) throw SingularMatrix(what + " has non-finite entries", 0.0);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().array() > 0.0).all()) {
        const double lambda = smallest_eigenvalue(m);
        throw SingularMatrix(what + " is not positive definite (smallest eigenvalue " +
                                 std::to_string(lambda) + ")",
                             lambda);
    }
    return llt;
}

}  // namespace selfisbi
