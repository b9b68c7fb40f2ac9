#pragma once

#include "selfisbi/compression.hpp"
#include "selfisbi/errors.hpp"
#include "selfisbi/param_prior.hpp"
#include "selfisbi/simulator.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace selfisbi {

struct AbcSettings {
    double epsilon = 2.0;  // +infinity accepts every draw
    std::size_t n_accept_target = 2000;
    std::size_t max_draws = 1'000'000;
    std::uint64_t seed_root = 0;
    std::size_t batch_size = 4096;  // draws evaluated concurrently before each acceptance scan
};

/// Forward chain omega -> compressed summary, consuming randomness from `rng` only.
using SummaryChain = std::function<Eigen::VectorXd(const ParamVector&, Rng&)>;

/// T -> simulator -> compress.
SummaryChain make_summary_chain(LatentMap T, const StochasticSimulator& simulator,
                                const CompressionArtifacts& artifacts);

/// Every draw made, in draw order, plus which were accepted. Draws whose chain failed
/// (solver divergence, non-finite output) carry an infinite distance and are rejected.
struct AbcResult {
    Eigen::MatrixXd omega;        // n_draws x 4
    Eigen::MatrixXd omega_tilde;  // n_draws x 4
    Eigen::VectorXd distance;     // n_draws
    std::vector<std::uint8_t> accepted;
    std::size_t n_accepted = 0;
    std::size_t n_failed = 0;
    /// Draws actually simulated. The parallel sampler evaluates whole batches, so this
    /// can exceed n_draws(); the surplus draws come after the stopping point and are
    /// discarded. It depends on the batch size, never on the thread count.
    std::size_t n_evaluated = 0;

    std::size_t n_draws() const { return accepted.size(); }
    double acceptance_rate() const {
        return n_draws() ? static_cast<double>(n_accepted) / static_cast<double>(n_draws()) : 0.0;
    }
    Eigen::MatrixXd accepted_samples() const;
};

/// The draw budget ran out before enough samples were accepted; carries what was found.
class BudgetExhausted : public Error {
public:
    BudgetExhausted(const std::string& what, AbcResult partial)
        : Error(what), partial_(std::move(partial)) {}
    const AbcResult& partial() const noexcept { return partial_; }

private:
    AbcResult partial_;
};

/// Rejection ABC with the Fisher-Rao discrepancy: draw omega_n ~ prior and simulate its
/// summary with stream (seed_root, n); accept iff d_FR < epsilon. Stops once
/// n_accept_target draws are accepted, scanning in draw order, so the result does not
/// depend on the thread count.
AbcResult rejection_sample(const ParamPrior& prior, const SummaryChain& chain,
                           const Eigen::VectorXd& omega_tilde_obs, const Eigen::MatrixXd& fisher,
                           const AbcSettings& settings);

/// Single-threaded reference implementation with identical output.
AbcResult rejection_sample_serial(const ParamPrior& prior, const SummaryChain& chain,
                                  const Eigen::VectorXd& omega_tilde_obs,
                                  const Eigen::MatrixXd& fisher, const AbcSettings& settings);

}  // namespace selfisbi
