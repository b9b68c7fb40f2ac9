#pragma once

#include "selfisbi/observer.hpp"
#include "selfisbi/random.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

namespace selfisbi {

/// The stochastic data model P(Phi | theta). Implementations must be safe to call
/// concurrently as long as each call owns its Rng.
class StochasticSimulator {
public:
    virtual ~StochasticSimulator() = default;

    virtual Eigen::Index latent_size() const = 0;
    virtual const std::shared_ptr<const DataLayout>& layout() const = 0;
    virtual Eigen::VectorXd simulate(const Eigen::VectorXd& theta, Rng& rng) const = 0;
    virtual std::string name() const = 0;

    Eigen::Index data_size() const { return layout()->size(); }
};

class ModelASimulator final : public StochasticSimulator {
public:
    explicit ModelASimulator(ObserverConfig config) : observer_(std::move(config)) {}

    Eigen::Index latent_size() const override {
        return 2 * static_cast<Eigen::Index>(observer_.n_steps());
    }
    const std::shared_ptr<const DataLayout>& layout() const override { return observer_.layout(); }
    Eigen::VectorXd simulate(const Eigen::VectorXd& theta, Rng& rng) const override {
        return observer_.model_A(theta, rng);
    }
    std::string name() const override { return "A"; }

private:
    Observer observer_;
};

class ModelBSimulator final : public StochasticSimulator {
public:
    explicit ModelBSimulator(ObserverConfig config) : observer_(std::move(config)) {}

    Eigen::Index latent_size() const override {
        return 2 * static_cast<Eigen::Index>(observer_.n_steps());
    }
    const std::shared_ptr<const DataLayout>& layout() const override { return observer_.layout(); }
    Eigen::VectorXd simulate(const Eigen::VectorXd& theta, Rng& rng) const override {
        return observer_.model_B(theta, rng);
    }
    std::string name() const override { return "B"; }

private:
    Observer observer_;
};

/// Phi = A theta + b + L z with z standard normal; the exactly linear-Gaussian test bed.
class LinearGaussianSimulator final : public StochasticSimulator {
public:
    /// `noise_cov` must be symmetric positive semi-definite (a zero matrix gives a
    /// noiseless simulator).
    LinearGaussianSimulator(Eigen::MatrixXd A, Eigen::VectorXd b, const Eigen::MatrixXd& noise_cov);

    Eigen::Index latent_size() const override { return A_.cols(); }
    const std::shared_ptr<const DataLayout>& layout() const override { return layout_; }
    Eigen::VectorXd simulate(const Eigen::VectorXd& theta, Rng& rng) const override;
    std::string name() const override { return "synthetic-linear"; }

    const Eigen::MatrixXd& matrix() const { return A_; }
    const Eigen::VectorXd& offset() const { return b_; }
    const Eigen::MatrixXd& noise_cov() const { return noise_cov_; }

private:
    Eigen::MatrixXd A_;
    Eigen::VectorXd b_;
    Eigen::MatrixXd noise_cov_;
    Eigen::MatrixXd noise_factor_;
    std::shared_ptr<const DataLayout> layout_;
};

/// Layout for data vectors without species structure: P entries, all kept.
std::shared_ptr<const DataLayout> flat_layout(Eigen::Index P);

/// Forwards to another simulator and counts calls; used to audit simulation budgets.
class CountingSimulator final : public StochasticSimulator {
public:
    explicit CountingSimulator(const StochasticSimulator& inner) : inner_(inner) {}

    Eigen::Index latent_size() const override { return inner_.latent_size(); }
    const std::shared_ptr<const DataLayout>& layout() const override { return inner_.layout(); }
    Eigen::VectorXd simulate(const Eigen::VectorXd& theta, Rng& rng) const override {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return inner_.simulate(theta, rng);
    }
    std::string name() const override { return inner_.name(); }

    std::uint64_t calls() const { return calls_.load(); }
    void reset() { calls_.store(0); }

private:
    const StochasticSimulator& inner_;
    mutable std::atomic<std::uint64_t> calls_{0};
};

}  // namespace selfisbi
