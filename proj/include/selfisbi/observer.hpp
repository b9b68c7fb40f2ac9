#pragma once

#include "selfisbi/lotka_volterra.hpp"
#include "selfisbi/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace selfisbi {

enum class Species : std::uint8_t { kPrey = 0, kPredator = 1 };

/// Known, fixed parameters of the observation process.
struct ObserverConfig {
    double p = 0.05;        // hunt perturbation
    double q = 0.01;        // gregariousness
    double r = 0.15;        // demographic noise strength
    double s_noise = 0.05;  // observational noise amplitude
    double t_noise = 0.2;   // prey/predator noise coupling
    double threshold_x = 6.0;
    double threshold_y = 7.0;
    double r_model_b = 0.105;  // demographic noise assumed by the simplified model
    double x0 = 10.0;
    double y0 = 5.0;
    std::vector<double> efficiency_x, efficiency_y;
    std::vector<int> mask_x, mask_y;

    std::size_t n_steps() const { return efficiency_x.size(); }

    /// Throws ConfigError on any violated invariant or mismatched array length.
    void validate(std::size_t n_steps) const;

    /// Reference defaults: seasonal efficiencies 0.8 + 0.2 sin(2 pi i / 25 + phase)
    /// (phase 0 for prey, pi/2 for predators), prey steps 20-24 and predator steps
    /// 35-39 masked.
    static ObserverConfig defaults(std::size_t n_steps);
};

/// Which (species, step) each data entry came from, in data-vector order.
struct DataLayout {
    struct Entry {
        Species species;
        std::uint32_t step;
        friend bool operator==(const Entry&, const Entry&) = default;
    };
    std::vector<int> mask_x, mask_y;
    std::vector<Entry> entries;

    static std::shared_ptr<const DataLayout> from_masks(const std::vector<int>& mask_x,
                                                        const std::vector<int>& mask_y);
    /// Position of each kept (species, step) within the full 2 * n_steps vector.
    std::vector<Eigen::Index> full_indices() const;
    Eigen::Index size() const { return static_cast<Eigen::Index>(entries.size()); }

    friend bool operator==(const DataLayout&, const DataLayout&) = default;
};

struct DataVector {
    Eigen::VectorXd values;
    std::shared_ptr<const DataLayout> layout;

    Eigen::Index size() const { return values.size(); }
};

struct SignalPair {
    Eigen::VectorXd x, y;
};

struct NoiseDraws {
    Eigen::VectorXd demographic_x, demographic_y;
    Eigen::VectorXd observational_x, observational_y;
};

SignalPair observe_signal(const LatentVector& theta, const ObserverConfig& config);

/// Demographic noise N(0, r z) per species and the coupled observational noise with
/// covariance s [[y, t sqrt(xy)], [t sqrt(xy), x]], drawn step by step in the order
/// (demographic x, demographic y, observational pair).
NoiseDraws sample_noise_model_A(const LatentVector& theta, const ObserverConfig& config,
                                Rng& rng);

/// Phi_z(t_i) = m_z(t_i) min(u_z(t_i), M_z), masked steps dropped.
DataVector censor(const Eigen::VectorXd& u_x, const Eigen::VectorXd& u_y,
                  const ObserverConfig& config);

DataVector simulate_model_A(const LatentVector& theta, const ObserverConfig& config, Rng& rng);

/// Direct observation with demographic noise of strength r_model_b, no thresholds.
DataVector simulate_model_B(const LatentVector& theta, const ObserverConfig& config, Rng& rng);

/// Validated observer with its layout computed once; cheap to call from many threads.
class Observer {
public:
    explicit Observer(ObserverConfig config);

    const ObserverConfig& config() const { return config_; }
    const std::shared_ptr<const DataLayout>& layout() const { return layout_; }
    std::size_t n_steps() const { return config_.n_steps(); }

    Eigen::VectorXd model_A(const Eigen::VectorXd& theta, Rng& rng) const;
    Eigen::VectorXd model_B(const Eigen::VectorXd& theta, Rng& rng) const;

private:
    ObserverConfig config_;
    std::shared_ptr<const DataLayout> layout_;
};

}  // namespace selfisbi
