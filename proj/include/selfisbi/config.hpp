#pragma once

#include "selfisbi/abc.hpp"
#include "selfisbi/lotka_volterra.hpp"
#include "selfisbi/observer.hpp"
#include "selfisbi/param_prior.hpp"
#include "selfisbi/selfi.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace selfisbi {

/// Which hierarchy the pipeline runs. For the Lotka-Volterra hierarchy "A" and "B"
/// only choose the default observer; both observers remain available per command.
enum class Hierarchy { kLotkaVolterra, kSyntheticLinear };

/// Exactly linear stand-in for the whole chain: T(omega) = M omega + c with S latent
/// entries; observer A adds N(0, noise_sd^2 I), observer B also adds a constant bias.
struct SyntheticSettings {
    std::size_t latent_size = 20;
    double noise_sd = 0.1;
    double model_b_bias = 0.5;
};

struct PipelineConfig {
    std::string model = "A";  // "A", "B" or "synthetic-linear"
    std::uint64_t seed_root = 20240607;
    std::string output_dir = "out";
    int threads = 0;  // 0: OpenMP default

    SolverSettings solver;
    ObserverConfig observer = ObserverConfig::defaults(50);
    ParamPrior prior;
    ParamVector omega_gt = ParamVector(0.55, 0.2, 0.2, 0.05);

    // SELFI expansion
    std::size_t N0 = 150;
    std::size_t Ns = 100;
    double fd_relative_step = 0.05;
    CovarianceEstimator covariance = CovarianceEstimator::kLedoitWolf;
    double lambda_C_relative = 1e-6;
    GradientEstimator gradient = GradientEstimator::kPaired;
    std::size_t latent_prior_draws = 300;
    double lambda_S_relative = 1e-4;

    // misspecification check
    std::size_t n_ref = 300;
    double verdict_percentile = 0.95;

    // compression
    double stencil_relative_step = 1e-3;
    double stencil_floor = 1e-3;

    // rejection ABC (seed taken from seed_root)
    AbcSettings abc;
    int histogram_bins = 30;

    SyntheticSettings synthetic;

    Hierarchy hierarchy() const {
        return model == "synthetic-linear" ? Hierarchy::kSyntheticLinear : Hierarchy::kLotkaVolterra;
    }
    /// The observer used when a command is not told otherwise: "A" or "B".
    std::string default_observer() const { return model == "B" ? "B" : "A"; }

    /// Throws ConfigError on inconsistent settings.
    void validate() const;

    nlohmann::json to_json() const;
    /// Starts from the defaults and overrides every key present; unknown keys are errors.
    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig load(const std::filesystem::path& path);
};

/// The config fields that determine results (drops output_dir and threads).
nlohmann::json result_relevant(const nlohmann::json& config);

}  // namespace selfisbi
