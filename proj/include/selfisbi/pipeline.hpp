#pragma once

#include "selfisbi/config.hpp"
#include "selfisbi/simulator.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace selfisbi {

/// The hierarchy selected by a config: the latent map T and both observers.
struct ModelSet {
    LatentMap T;
    std::unique_ptr<StochasticSimulator> model_A;
    std::unique_ptr<StochasticSimulator> model_B;

    /// "A" or "B"; throws ConfigError otherwise.
    const StochasticSimulator& observer(const std::string& which) const;
};

ModelSet make_models(const PipelineConfig& config);

/// Stage names as recorded in the manifest.
std::string selfi_stage(const std::string& model);
std::string sbi_stage(const std::string& model);
inline constexpr const char* kMockStage = "generate_mock";
inline constexpr const char* kMisspecStage = "check_misspec";

/// Each command reads its inputs through the manifest (checksums verified), writes its
/// outputs with write-then-rename, records them in the manifest and returns a short
/// human-readable summary.

/// theta_gt = T(omega_gt), Phi_O ~ model A at theta_gt. Starts a fresh manifest.
std::string cmd_generate_mock(const PipelineConfig& config);

/// Expansion ensembles, artifacts, latent prior and SELFI posterior for one observer,
/// written to model_<model>/.
std::string cmd_selfi(const PipelineConfig& config, const std::string& model);

/// Mahalanobis check of every observer with a completed SELFI stage, written to misspec/.
std::string cmd_check_misspec(const PipelineConfig& config);

/// Compression artifacts from the recycled SELFI products, the compressed observation
/// and rejection ABC, written to sbi_<model>/. On budget exhaustion the partial
/// samples are written and BudgetExhausted is rethrown.
std::string cmd_compress_and_sbi(const PipelineConfig& config, const std::string& model);

/// Consolidated report of whatever stages exist in `out_dir`. Never writes.
std::string cmd_report(const std::filesystem::path& out_dir);

/// Sets the OpenMP worker count when n > 0.
void set_worker_threads(int n);

}  // namespace selfisbi
