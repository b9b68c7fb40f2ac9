#include "selfisbi/compression.hpp"

#include "selfisbi/covariance.hpp"
#include "selfisbi/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace selfisbi {

Eigen::VectorXd default_stencil_steps(const Eigen::VectorXd& omega0, double rel, double floor) {
    return rel * omega0.cwiseAbs().cwiseMax(floor);
}

Eigen::MatrixXd grad_T(const LatentMap& T, const Eigen::VectorXd& omega0,
                       const Eigen::VectorXd& fd_step) {
    static constexpr std::array<double, 7> kCoeff = {-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0,
                                                     3.0 / 4.0,   -3.0 / 20.0, 1.0 / 60.0};
    const Eigen::Index N = omega0.size();
    if (fd_step.size() != N) throw DimensionError("grad_T: one step per parameter");
    for (Eigen::Index j = 0; j < N; ++j) {
        if (!(fd_step[j] > 0.0)) throw PreconditionError("grad_T: steps must be positive");
    }
    Eigen::MatrixXd grad;
    for (Eigen::Index j = 0; j < N; ++j) {
        Eigen::VectorXd col;
        for (int k = -3; k <= 3; ++k) {
            if (k == 0) continue;
            Eigen::VectorXd omega = omega0;
            omega[j] += k * fd_step[j];
            Eigen::VectorXd t;
            try {
                t = T(omega);
            } catch (const SolverDivergence& e) {
                throw SolverDivergence(e.step(), "grad_T: component " + std::to_string(j) +
                                                     ", offset " + std::to_string(k) + ": " +
                                                     e.what());
            } catch (const Error& e) {
                throw PreconditionError("grad_T: component " + std::to_string(j) + ", offset " +
                                        std::to_string(k) + ": " + e.what());
            }
            if (col.size() == 0) col = Eigen::VectorXd::Zero(t.size());
            col += kCoeff[static_cast<std::size_t>(k + 3)] * t;
        }
        if (j == 0) grad.resize(col.size(), N);
        grad.col(j) = col / fd_step[j];
    }
    return grad;
}

Eigen::MatrixXd grad_f_omega(const Eigen::MatrixXd& grad_f0, const Eigen::MatrixXd& grad_T0) {
    if (grad_f0.cols() != grad_T0.rows()) {
        throw DimensionError("grad_f_omega: grad f0 has " + std::to_string(grad_f0.cols()) +
                             " columns but grad T0 has " + std::to_string(grad_T0.rows()) + " rows");
    }
    return grad_f0 * grad_T0;
}

FisherMatrix fisher_matrix(const Eigen::MatrixXd& G, const Eigen::MatrixXd& C0) {
    if (C0.rows() != G.rows()) throw DimensionError("fisher_matrix: C0 does not match gradient");
    const auto c0 = spd_factor(C0, "C0");
    FisherMatrix out;
    out.fisher = symmetrized(G.transpose() * c0.solve(G));
    const Eigen::Index N = out.fisher.rows();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.fisher, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(lo > 1e-14 * hi) || !(hi > 0.0)) {
        throw SingularMatrix("Fisher matrix is singular: parameters are not identifiable at "
                             "the fiducial point (smallest eigenvalue " +
                                 std::to_string(lo) + ")",
                             lo);
    }
    // Invert the unit-diagonal rescaling; parameters with very different scales would
    // otherwise cost digits for no reason.
    const Eigen::VectorXd d = out.fisher.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd scaled = d.asDiagonal() * out.fisher * d.asDiagonal();
    const auto llt = spd_factor(scaled, "scaled Fisher matrix");
    out.inverse = symmetrized(d.asDiagonal() * llt.solve(Eigen::MatrixXd::Identity(N, N)) *
                              d.asDiagonal());
    return out;
}

CompressionArtifacts build_compression_artifacts(const ExpansionArtifacts& expansion,
                                                 const LatentMap& T,
                                                 const Eigen::VectorXd& omega0,
                                                 const Eigen::VectorXd& fd_step) {
    expansion.validate();
    CompressionArtifacts c;
    c.omega0 = omega0;
    c.grad_T0 = grad_T(T, omega0, fd_step);
    if (c.grad_T0.rows() != expansion.latent_size()) {
        throw DimensionError("latent map output does not match the expansion point");
    }
    c.grad_f_omega = grad_f_omega(expansion.grad_f0, c.grad_T0);
    auto fm = fisher_matrix(c.grad_f_omega, expansion.C0);
    c.fisher = std::move(fm.fisher);
    c.fisher_inverse = std::move(fm.inverse);
    const auto c0 = spd_factor(expansion.C0, "C0");
    c.gain = c.fisher_inverse * c0.solve(c.grad_f_omega).transpose();
    c.f0 = expansion.f0;
    c.layout = expansion.layout;
    return c;
}

Eigen::VectorXd compress(const Eigen::VectorXd& phi, const CompressionArtifacts& a) {
    if (phi.size() != a.f0.size()) {
        throw IncompatibleData("data vector has " + std::to_string(phi.size()) +
                               " entries, compression expects " + std::to_string(a.f0.size()));
    }
    return a.omega0 + a.gain * (phi - a.f0);
}

Eigen::VectorXd compress(const DataVector& phi, const CompressionArtifacts& a) {
    if (a.layout && phi.layout && !(*a.layout == *phi.layout)) {
        throw IncompatibleData("data vector was censored with different masks than f0/C0");
    }
    return compress(phi.values, a);
}

double fisher_rao_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                           const Eigen::MatrixXd& fisher) {
    if (a.size() != b.size() || fisher.rows() != a.size()) {
        throw DimensionError("fisher_rao_distance: size mismatch");
    }
    const Eigen::VectorXd d = a - b;
    return std::sqrt(std::max(0.0, d.dot(fisher * d)));
}

}  // namespace selfisbi
