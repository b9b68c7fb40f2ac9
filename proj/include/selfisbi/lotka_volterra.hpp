#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

namespace selfisbi {

/// Top-level parameters (alpha, beta, gamma, delta): prey growth, predation,
/// predator mortality, predator growth per prey.
using ParamVector = Eigen::Vector4d;

/// Prey trajectory followed by predator trajectory, `n_steps` values each.
struct LatentVector {
    Eigen::VectorXd values;
    std::size_t n_steps = 0;
    double dt = 1.0;

    Eigen::Index size() const { return values.size(); }
    auto prey() const { return values.head(static_cast<Eigen::Index>(n_steps)); }
    auto predator() const { return values.tail(static_cast<Eigen::Index>(n_steps)); }

    /// Throws DimensionError unless size() == 2 * n_steps.
    void validate() const;
};

/// Explicit Euler settings of the latent map. Defaults are the reference
/// benchmark: 50 steps of 0.4 time units from (10, 5).
struct SolverSettings {
    double x0 = 10.0;
    double y0 = 5.0;
    double dt = 0.4;
    std::size_t n_steps = 50;
};

/// Throws PreconditionError unless all components are finite.
void validate_params(const ParamVector& omega);

/// x_{i+1} = x_i (1 + (alpha - beta y_i) dt), y_{i+1} = y_i (1 + (delta x_i - gamma) dt),
/// each floored at zero. With dt = 1 this is the literal recurrence
/// x_{i+1} = x_i (1 + alpha - beta y_i).
/// Throws SolverDivergence naming the first step that produced a non-finite value.
LatentVector solve_lv(const ParamVector& omega, double x0, double y0, double dt,
                      std::size_t n_steps);

/// The deterministic map T from parameters to latent trajectories.
class LotkaVolterraMap {
public:
    LotkaVolterraMap() = default;
    explicit LotkaVolterraMap(const SolverSettings& settings);

    LatentVector operator()(const ParamVector& omega) const;
    const SolverSettings& settings() const { return settings_; }
    Eigen::Index latent_size() const { return 2 * static_cast<Eigen::Index>(settings_.n_steps); }

private:
    SolverSettings settings_;
};

/// Type-erased latent map on raw vectors, used by the generic gradient code.
using LatentMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

LatentMap as_latent_map(const LotkaVolterraMap& map);

}  // namespace selfisbi
