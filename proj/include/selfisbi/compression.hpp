#pragma once

#include "selfisbi/lotka_volterra.hpp"
#include "selfisbi/selfi.hpp"

#include <Eigen/Dense>

#include <memory>

namespace selfisbi {

/// Default stencil steps h_j = rel * max(|omega0_j|, floor).
Eigen::VectorXd default_stencil_steps(const Eigen::VectorXd& omega0, double rel = 1e-3,
                                      double floor = 1e-3);

/// S x N Jacobian of T at omega0 with the 7-point sixth-order central stencil.
/// A failing stencil evaluation is rethrown naming the component and offset.
Eigen::MatrixXd grad_T(const LatentMap& T, const Eigen::VectorXd& omega0,
                       const Eigen::VectorXd& fd_step);

/// Chain rule: grad_f0 (P x S) times grad_T0 (S x N).
Eigen::MatrixXd grad_f_omega(const Eigen::MatrixXd& grad_f0, const Eigen::MatrixXd& grad_T0);

struct FisherMatrix {
    Eigen::MatrixXd fisher;
    Eigen::MatrixXd inverse;
};

/// F0 = G^T C0^-1 G via a Cholesky solve. Throws SingularMatrix if any eigenvalue of
/// F0 is not positive, i.e. if the parameters are not identifiable at omega0.
FisherMatrix fisher_matrix(const Eigen::MatrixXd& grad_f_omega, const Eigen::MatrixXd& C0);

/// Everything needed to compress a data vector. Built from recycled expansion
/// artifacts and deterministic T evaluations only.
struct CompressionArtifacts {
    Eigen::VectorXd omega0;
    Eigen::MatrixXd grad_T0;
    Eigen::MatrixXd grad_f_omega;
    Eigen::MatrixXd fisher;
    Eigen::MatrixXd fisher_inverse;
    Eigen::MatrixXd gain;  // N x P map F0^-1 G^T C0^-1
    Eigen::VectorXd f0;
    std::shared_ptr<const DataLayout> layout;
};

CompressionArtifacts build_compression_artifacts(const ExpansionArtifacts& expansion,
                                                 const LatentMap& T,
                                                 const Eigen::VectorXd& omega0,
                                                 const Eigen::VectorXd& fd_step);

/// omega~ = omega0 + F0^-1 G^T C0^-1 (phi - f0).
Eigen::VectorXd compress(const Eigen::VectorXd& phi, const CompressionArtifacts& artifacts);

/// As above; additionally rejects data censored with different masks (IncompatibleData).
Eigen::VectorXd compress(const DataVector& phi, const CompressionArtifacts& artifacts);

/// sqrt((a - b)^T F0 (a - b)).
double fisher_rao_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                           const Eigen::MatrixXd& fisher);

}  // namespace selfisbi
