#pragma once

#include "selfisbi/ensemble.hpp"
#include "selfisbi/lotka_volterra.hpp"
#include "selfisbi/param_prior.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace selfisbi {

enum class CovarianceEstimator {
    kJitter,      // unbiased sample covariance + lambda_C I
    kLedoitWolf,  // shrunk toward the diagonal, then + lambda_C I
};

enum class GradientEstimator {
    kPaired,    // mean over k < Ns of (Phi_k(theta0 + h_i e_i) - Phi_k(theta0)) / h_i
    kUnpaired,  // (mean of direction runs - f0) / h_i
};

struct DataModelEstimate {
    Eigen::VectorXd f0;
    Eigen::MatrixXd C0;
    double lambda_C = 0.0;
    double shrinkage = 0.0;
};

/// f0 = sample mean of the runs at theta0, C0 = covariance estimate + lambda_C I with
/// lambda_C = rel * trace / P, or `rel` itself when the trace vanishes.
DataModelEstimate estimate_f0_C0(const SimulationArchive& archive,
                                 CovarianceEstimator estimator = CovarianceEstimator::kJitter,
                                 double lambda_rel = 1e-6);

/// P x S forward-difference gradient of the mean data model.
Eigen::MatrixXd estimate_grad_f0(const SimulationArchive& archive, const Eigen::VectorXd& f0,
                                 GradientEstimator estimator = GradientEstimator::kPaired);

/// Everything the linearised data model needs: theta0, f0, C0, grad f0, plus metadata.
struct ExpansionArtifacts {
    Eigen::VectorXd theta0;
    Eigen::VectorXd f0;
    Eigen::MatrixXd C0;
    Eigen::MatrixXd grad_f0;
    Eigen::VectorXd steps;
    std::size_t N0 = 0;
    std::size_t Ns = 0;
    std::uint64_t seed_root = 0;
    double lambda_C = 0.0;
    double shrinkage = 0.0;
    std::shared_ptr<const DataLayout> layout;

    Eigen::Index data_size() const { return f0.size(); }
    Eigen::Index latent_size() const { return theta0.size(); }
    /// Throws DimensionError / SingularMatrix / PreconditionError on a broken invariant.
    void validate() const;
};

ExpansionArtifacts build_expansion_artifacts(
    const SimulationArchive& archive,
    CovarianceEstimator cov_estimator = CovarianceEstimator::kJitter,
    GradientEstimator grad_estimator = GradientEstimator::kPaired, double lambda_rel = 1e-6);

/// Gaussian prior on the latent function, centred on the expansion point.
struct LatentPrior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    double lambda_S = 0.0;
};

/// Sample covariance of the rows of `draws` + lambda_S I, mean forced to theta0.
/// lambda_S = lambda_abs + lambda_rel * trace / S must be positive.
LatentPrior latent_prior_from_draws(const Eigen::MatrixXd& draws, const Eigen::VectorXd& theta0,
                                    double lambda_rel, double lambda_abs = 0.0);

/// Prior-predictive latent draws T(omega_n), omega_n ~ prior, n < n_draws, one derived
/// stream per draw.
Eigen::MatrixXd draw_latent_functions(const ParamPrior& prior, const LatentMap& T,
                                      std::size_t n_draws, std::uint64_t seed_root, Stream stream);

LatentPrior build_latent_prior(const ParamPrior& prior, const LatentMap& T,
                               const Eigen::VectorXd& theta0, std::size_t n_draws,
                               double lambda_rel, double lambda_abs, std::uint64_t seed_root);

struct SelfiPosterior {
    Eigen::VectorXd gamma;
    Eigen::MatrixXd Gamma;
};

/// gamma = theta0 + Gamma grad_f0^T C0^-1 (phi - f0),
/// Gamma = (grad_f0^T C0^-1 grad_f0 + prior^-1)^-1, all via Cholesky solves.
SelfiPosterior selfi_posterior(const ExpansionArtifacts& artifacts, const LatentPrior& prior,
                               const Eigen::VectorXd& phi_obs);
SelfiPosterior selfi_posterior(const ExpansionArtifacts& artifacts, const LatentPrior& prior,
                               const DataVector& phi_obs);

/// Mahalanobis distance with a covariance factorized once.
class MahalanobisMetric {
public:
    MahalanobisMetric(Eigen::VectorXd center, const Eigen::MatrixXd& covariance);
    double operator()(const Eigen::VectorXd& theta) const;

private:
    Eigen::VectorXd center_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

double mahalanobis(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta0,
                   const Eigen::MatrixXd& prior_cov);

struct MisspecReport {
    double d_posterior = 0.0;
    std::vector<double> reference;
    double reference_mean = 0.0;
    double reference_se = 0.0;
    double quantile = 0.0;   // fraction of reference distances strictly below d_posterior
    double threshold = 0.0;  // reference percentile used for the verdict
    double percentile = 0.95;
    std::string verdict;     // "consistent" or "suspect"
};

/// Fraction of `reference` strictly below `value`.
double empirical_quantile_of(double value, const std::vector<double>& reference);

/// Linear-interpolated percentile (p in [0, 1]) of unsorted values.
double percentile(std::vector<double> values, double p);

/// d_M(gamma) against the distribution of d_M(T(omega_n)), omega_n ~ prior. Flags
/// "suspect" when d_M(gamma) exceeds the given percentile of the reference distances.
MisspecReport misspec_report(const Eigen::VectorXd& gamma, const Eigen::VectorXd& theta0,
                             const Eigen::MatrixXd& prior_cov, const ParamPrior& prior_omega,
                             const LatentMap& T, std::size_t n_ref, std::uint64_t seed_root,
                             double verdict_percentile = 0.95);

}  // namespace selfisbi
