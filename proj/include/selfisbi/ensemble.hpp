#pragma once

#include "selfisbi/simulator.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>

namespace selfisbi {

/// Raw forward simulations behind the SELFI expansion.
///
/// Row k of `expansion` is simulation k at theta0. Row i * Ns + k of `directions`
/// is simulation k at theta0 + h_i e_i. Simulation k of every direction group uses
/// the same derived seed as expansion simulation k, so direction-minus-expansion
/// differences cancel the common noise.
struct SimulationArchive {
    Eigen::VectorXd theta0;
    Eigen::VectorXd steps;
    Eigen::MatrixXd expansion;   // N0 x P
    Eigen::MatrixXd directions;  // (S * Ns) x P
    std::size_t N0 = 0;
    std::size_t Ns = 0;
    std::uint64_t seed_root = 0;
    std::shared_ptr<const DataLayout> layout;

    Eigen::Index latent_size() const { return theta0.size(); }
    Eigen::Index data_size() const { return expansion.cols(); }
    std::uint64_t simulation_count() const {
        return static_cast<std::uint64_t>(expansion.rows() + directions.rows());
    }
    /// Ns x P block of direction i. Throws InsufficientData naming the direction if absent.
    Eigen::MatrixXd direction_block(Eigen::Index i) const;
};

/// Default forward-difference steps h_i = rel * max(|theta0_i|, 1).
Eigen::VectorXd default_fd_steps(const Eigen::VectorXd& theta0, double rel = 0.05);

/// Runs N0 + Ns * S simulations with OpenMP. The archive is a pure function of the
/// arguments, whatever the thread count. Any failed simulation (exception or
/// non-finite output) aborts with EnsembleFailure listing the affected groups.
SimulationArchive run_expansion_ensembles(const Eigen::VectorXd& theta0,
                                          const StochasticSimulator& simulator, std::size_t N0,
                                          std::size_t Ns, const Eigen::VectorXd& h,
                                          std::uint64_t seed_root);

/// Single-threaded reference implementation with identical output.
SimulationArchive run_expansion_ensembles_serial(const Eigen::VectorXd& theta0,
                                                 const StochasticSimulator& simulator,
                                                 std::size_t N0, std::size_t Ns,
                                                 const Eigen::VectorXd& h,
                                                 std::uint64_t seed_root);

}  // namespace selfisbi
