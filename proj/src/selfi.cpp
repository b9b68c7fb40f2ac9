#include "selfisbi/selfi.hpp"

#include "selfisbi/covariance.hpp"
#include "selfisbi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace selfisbi {

DataModelEstimate estimate_f0_C0(const SimulationArchive& archive, CovarianceEstimator estimator,
                                 double lambda_rel) {
    if (archive.expansion.rows() < 2) {
        throw InsufficientData("estimating C0 needs at least two runs at theta0, archive has " +
                               std::to_string(archive.expansion.rows()));
    }
    if (!(lambda_rel > 0.0)) throw PreconditionError("lambda_C must be positive");
    DataModelEstimate out;
    out.f0 = sample_mean(archive.expansion);
    if (estimator == CovarianceEstimator::kLedoitWolf) {
        auto shrunk = ledoit_wolf_diagonal(archive.expansion);
        out.C0 = std::move(shrunk.covariance);
        out.shrinkage = shrunk.intensity;
    } else {
        out.C0 = sample_covariance(archive.expansion);
    }
    const double P = static_cast<double>(out.C0.rows());
    const double trace = out.C0.trace();
    out.lambda_C = trace > 0.0 ? lambda_rel * trace / P : lambda_rel;
    out.C0.diagonal().array() += out.lambda_C;
    return out;
}

Eigen::MatrixXd estimate_grad_f0(const SimulationArchive& archive, const Eigen::VectorXd& f0,
                                 GradientEstimator estimator) {
    const Eigen::Index S = archive.latent_size();
    const Eigen::Index P = archive.data_size();
    if (f0.size() != P) throw DimensionError("f0 does not match the archive's data size");
    const auto ns = static_cast<Eigen::Index>(archive.Ns);
    if (estimator == GradientEstimator::kPaired && archive.expansion.rows() < ns) {
        throw InsufficientData("paired gradient needs at least Ns runs at theta0");
    }
    Eigen::MatrixXd grad(P, S);
    for (Eigen::Index i = 0; i < S; ++i) {
        const Eigen::MatrixXd block = archive.direction_block(i);
        Eigen::VectorXd diff;
        if (estimator == GradientEstimator::kPaired) {
            diff = (block - archive.expansion.topRows(ns)).colwise().mean().transpose();
        } else {
            diff = block.colwise().mean().transpose() - f0;
        }
        grad.col(i) = diff / archive.steps[i];
    }
    if (!grad.allFinite()) throw InternalInvariant("gradient of f0 has non-finite entries");
    return grad;
}

void ExpansionArtifacts::validate() const {
    const Eigen::Index P = f0.size(), S = theta0.size();
    if (C0.rows() != P || C0.cols() != P) throw DimensionError("C0 must be P x P");
    if (grad_f0.rows() != P || grad_f0.cols() != S) throw DimensionError("grad f0 must be P x S");
    if (!grad_f0.allFinite()) throw PreconditionError("grad f0 has non-finite entries");
    if (layout && layout->size() != P) throw DimensionError("layout does not match f0");
    spd_factor(C0, "C0");
}

ExpansionArtifacts build_expansion_artifacts(const SimulationArchive& archive,
                                             CovarianceEstimator cov_estimator,
                                             GradientEstimator grad_estimator, double lambda_rel) {
    auto est = estimate_f0_C0(archive, cov_estimator, lambda_rel);
    ExpansionArtifacts a;
    a.grad_f0 = estimate_grad_f0(archive, est.f0, grad_estimator);
    a.theta0 = archive.theta0;
    a.f0 = std::move(est.f0);
    a.C0 = std::move(est.C0);
    a.steps = archive.steps;
    a.N0 = archive.N0;
    a.Ns = archive.Ns;
    a.seed_root = archive.seed_root;
    a.lambda_C = est.lambda_C;
    a.shrinkage = est.shrinkage;
    a.layout = archive.layout;
    a.validate();
    return a;
}

LatentPrior latent_prior_from_draws(const Eigen::MatrixXd& draws, const Eigen::VectorXd& theta0,
                                    double lambda_rel, double lambda_abs) {
    if (draws.cols() != theta0.size()) throw DimensionError("latent draws do not match theta0");
    LatentPrior prior;
    prior.mean = theta0;
    prior.covariance = sample_covariance(draws);
    const double S = static_cast<double>(theta0.size());
    prior.lambda_S = lambda_abs + lambda_rel * prior.covariance.trace() / S;
    if (!(prior.lambda_S > 0.0)) {
        throw PreconditionError("lambda_S must be positive (got " +
                                std::to_string(prior.lambda_S) + ")");
    }
    prior.covariance.diagonal().array() += prior.lambda_S;
    return prior;
}

Eigen::MatrixXd draw_latent_functions(const ParamPrior& prior, const LatentMap& T,
                                      std::size_t n_draws, std::uint64_t seed_root,
                                      Stream stream) {
    prior.validate();
    Eigen::MatrixXd draws;
    for (std::size_t n = 0; n < n_draws; ++n) {
        Rng rng = make_rng(seed_root, stream, 0, n);
        const Eigen::VectorXd theta = T(prior.sample(rng));
        if (n == 0) draws.resize(static_cast<Eigen::Index>(n_draws), theta.size());
        draws.row(static_cast<Eigen::Index>(n)) = theta.transpose();
    }
    return draws;
}

LatentPrior build_latent_prior(const ParamPrior& prior, const LatentMap& T,
                               const Eigen::VectorXd& theta0, std::size_t n_draws,
                               double lambda_rel, double lambda_abs, std::uint64_t seed_root) {
    if (n_draws < 2) throw InsufficientData("latent prior needs at least two draws");
    const Eigen::MatrixXd draws =
        draw_latent_functions(prior, T, n_draws, seed_root, Stream::kLatentPrior);
    return latent_prior_from_draws(draws, theta0, lambda_rel, lambda_abs);
}

SelfiPosterior selfi_posterior(const ExpansionArtifacts& a, const LatentPrior& prior,
                               const Eigen::VectorXd& phi_obs) {
    const Eigen::Index P = a.f0.size(), S = a.theta0.size();
    if (phi_obs.size() != P) {
        throw DimensionError("observed data has " + std::to_string(phi_obs.size()) +
                             " entries, artifacts expect " + std::to_string(P));
    }
    if (a.grad_f0.rows() != P || a.grad_f0.cols() != S) throw DimensionError("grad f0 must be P x S");
    if (prior.covariance.rows() != S || prior.covariance.cols() != S || prior.mean.size() != S) {
        throw DimensionError("latent prior does not match theta0");
    }
    const double scale = 1.0 + a.theta0.cwiseAbs().maxCoeff();
    if ((prior.mean - a.theta0).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw IncompatibleData("latent prior mean must equal the expansion point");
    }

    const auto c0 = spd_factor(a.C0, "C0");
    const auto prior_llt = spd_factor(prior.covariance, "latent prior covariance");
    const Eigen::MatrixXd cinv_grad = c0.solve(a.grad_f0);
    const Eigen::MatrixXd prior_inv = symmetrized(prior_llt.solve(Eigen::MatrixXd::Identity(S, S)));
    const Eigen::MatrixXd precision =
        symmetrized(a.grad_f0.transpose() * cinv_grad + prior_inv);
    const auto post_llt = spd_factor(precision, "posterior precision");

    SelfiPosterior post;
    const Eigen::VectorXd score = cinv_grad.transpose() * (phi_obs - a.f0);
    post.gamma = a.theta0 + post_llt.solve(score);
    post.Gamma = symmetrized(post_llt.solve(Eigen::MatrixXd::Identity(S, S)));
    return post;
}

SelfiPosterior selfi_posterior(const ExpansionArtifacts& a, const LatentPrior& prior,
                               const DataVector& phi_obs) {
    if (a.layout && phi_obs.layout && !(*a.layout == *phi_obs.layout)) {
        throw IncompatibleData("observed data were censored with different masks than the "
                               "expansion simulations");
    }
    return selfi_posterior(a, prior, phi_obs.values);
}

MahalanobisMetric::MahalanobisMetric(Eigen::VectorXd center, const Eigen::MatrixXd& covariance)
    : center_(std::move(center)), llt_(spd_factor(covariance, "Mahalanobis covariance")) {
    if (covariance.rows() != center_.size()) throw DimensionError("covariance does not match center");
}

double MahalanobisMetric::operator()(const Eigen::VectorXd& theta) const {
    if (theta.size() != center_.size()) throw DimensionError("Mahalanobis: size mismatch");
    const Eigen::VectorXd w = llt_.matrixL().solve(theta - center_);
    return std::sqrt(w.squaredNorm());
}

double mahalanobis(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta0,
                   const Eigen::MatrixXd& prior_cov) {
    return MahalanobisMetric(theta0, prior_cov)(theta);
}

double empirical_quantile_of(double value, const std::vector<double>& reference) {
    if (reference.empty()) throw InsufficientData("empty reference distribution");
    const auto below = std::count_if(reference.begin(), reference.end(),
                                     [value](double r) { return r < value; });
    return static_cast<double>(below) / static_cast<double>(reference.size());
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw InsufficientData("percentile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("percentile must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

MisspecReport misspec_report(const Eigen::VectorXd& gamma, const Eigen::VectorXd& theta0,
                             const Eigen::MatrixXd& prior_cov, const ParamPrior& prior_omega,
                             const LatentMap& T, std::size_t n_ref, std::uint64_t seed_root,
                             double verdict_percentile) {
    if (n_ref < 100) throw PreconditionError("reference ensemble needs at least 100 draws");
    const MahalanobisMetric metric(theta0, prior_cov);
    MisspecReport r;
    r.d_posterior = metric(gamma);
    const Eigen::MatrixXd draws =
        draw_latent_functions(prior_omega, T, n_ref, seed_root, Stream::kMisspecReference);
    r.reference.reserve(n_ref);
    for (Eigen::Index n = 0; n < draws.rows(); ++n) {
        r.reference.push_back(metric(draws.row(n).transpose()));
    }
    const Eigen::Map<const Eigen::VectorXd> ref(r.reference.data(),
                                                static_cast<Eigen::Index>(r.reference.size()));
    r.reference_mean = ref.mean();
    const double var = (ref.array() - r.reference_mean).square().sum() /
                       static_cast<double>(ref.size() - 1);
    r.reference_se = std::sqrt(var / static_cast<double>(ref.size()));
    r.quantile = empirical_quantile_of(r.d_posterior, r.reference);
    r.percentile = verdict_percentile;
    r.threshold = percentile(r.reference, verdict_percentile);
    r.verdict = r.d_posterior > r.threshold ? "suspect" : "consistent";
    return r;
}

}  // namespace selfisbi
