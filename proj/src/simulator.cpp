#include "selfisbi/simulator.hpp"

#include "selfisbi/errors.hpp"

#include <algorithm>
#include <vector>

namespace selfisbi {

std::shared_ptr<const DataLayout> flat_layout(Eigen::Index P) {
    const auto n = static_cast<std::size_t>(P);
    return DataLayout::from_masks(std::vector<int>(n, 1), std::vector<int>(n, 0));
}

LinearGaussianSimulator::LinearGaussianSimulator(Eigen::MatrixXd A, Eigen::VectorXd b,
                                                 const Eigen::MatrixXd& noise_cov)
    : A_(std::move(A)), b_(std::move(b)), noise_cov_(noise_cov) {
    if (b_.size() != A_.rows() || noise_cov.rows() != A_.rows() ||
        noise_cov.cols() != A_.rows()) {
        throw DimensionError("linear simulator: offset/noise covariance do not match A");
    }
    // Eigendecomposition rather than Cholesky so singular (e.g. zero) covariances work.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (noise_cov + noise_cov.transpose()));
    const Eigen::VectorXd ev = eig.eigenvalues();
    const double tol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (ev.minCoeff() < -tol) {
        throw PreconditionError("linear simulator: noise covariance is not positive semi-definite");
    }
    noise_factor_ = eig.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    layout_ = flat_layout(A_.rows());
}

Eigen::VectorXd LinearGaussianSimulator::simulate(const Eigen::VectorXd& theta, Rng& rng) const {
    if (theta.size() != A_.cols()) throw DimensionError("linear simulator: latent size mismatch");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(A_.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    return A_ * theta + b_ + noise_factor_ * z;
}

}  // namespace selfisbi
