#include "selfisbi/observer.hpp"

#include "selfisbi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace selfisbi {

namespace {

inline double clamp0(double v) { return v > 0.0 ? v : 0.0; }

void check_latent(const Eigen::VectorXd& theta, std::size_t n_steps) {
    if (theta.size() != 2 * static_cast<Eigen::Index>(n_steps)) {
        throw DimensionError("latent vector has " + std::to_string(theta.size()) +
                             " entries, observer expects " + std::to_string(2 * n_steps));
    }
}

// The three kernels below work on raw latent vectors so the hot ensemble path does not
// allocate a LatentVector per simulation.

void signal_into(const Eigen::VectorXd& theta, const ObserverConfig& c, Eigen::VectorXd& sx,
                 Eigen::VectorXd& sy) {
    const auto n = static_cast<Eigen::Index>(c.n_steps());
    sx.resize(n);
    sy.resize(n);
    sx[0] = c.x0;
    sy[0] = c.y0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double x = clamp0(theta[i]);
        const double y = clamp0(theta[n + i]);
        sx[i + 1] = clamp0(c.efficiency_x[i] * (x - c.p * x * y + c.q * x * x));
        sy[i + 1] = clamp0(c.efficiency_y[i] * (y + c.p * x * y - c.q * y * y));
    }
}

void noise_into(const Eigen::VectorXd& theta, const ObserverConfig& c, Rng& rng,
                NoiseDraws& out) {
    const auto n = static_cast<Eigen::Index>(c.n_steps());
    out.demographic_x.resize(n);
    out.demographic_y.resize(n);
    out.observational_x.resize(n);
    out.observational_y.resize(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double one_minus_t2 = 1.0 - c.t_noise * c.t_noise;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = clamp0(theta[i]);
        const double y = clamp0(theta[n + i]);
        const double zx = normal(rng), zy = normal(rng);
        const double z1 = normal(rng), z2 = normal(rng);
        out.demographic_x[i] = std::sqrt(c.r * x) * zx;
        out.demographic_y[i] = std::sqrt(c.r * y) * zy;
        // Cholesky factor of s [[y, t sqrt(xy)], [t sqrt(xy), x]].
        const double l11 = std::sqrt(c.s_noise * y);
        double l21 = 0.0, l22_sq = c.s_noise * x;
        if (l11 > 0.0) {
            l21 = c.t_noise * std::sqrt(c.s_noise * x);
            l22_sq = c.s_noise * x * one_minus_t2;
        }
        if (l22_sq < 0.0) {
            throw InternalInvariant("observational noise covariance is not positive semi-definite");
        }
        out.observational_x[i] = l11 * z1;
        out.observational_y[i] = l21 * z1 + std::sqrt(l22_sq) * z2;
    }
}

Eigen::VectorXd censor_values(const Eigen::VectorXd& u_x, const Eigen::VectorXd& u_y,
                              const DataLayout& layout, double mx, double my) {
    Eigen::VectorXd phi(layout.size());
    Eigen::Index k = 0;
    for (const auto& e : layout.entries) {
        phi[k++] = e.species == Species::kPrey ? std::min(u_x[e.step], mx)
                                               : std::min(u_y[e.step], my);
    }
    return phi;
}

Eigen::VectorXd model_A_values(const Eigen::VectorXd& theta, const ObserverConfig& c,
                               const DataLayout& layout, Rng& rng) {
    check_latent(theta, c.n_steps());
    Eigen::VectorXd sx, sy;
    signal_into(theta, c, sx, sy);
    NoiseDraws noise;
    noise_into(theta, c, rng, noise);
    const Eigen::VectorXd ux = sx + noise.demographic_x + noise.observational_x;
    const Eigen::VectorXd uy = sy + noise.demographic_y + noise.observational_y;
    return censor_values(ux, uy, layout, c.threshold_x, c.threshold_y);
}

Eigen::VectorXd model_B_values(const Eigen::VectorXd& theta, const ObserverConfig& c,
                               const DataLayout& layout, Rng& rng) {
    check_latent(theta, c.n_steps());
    const auto n = static_cast<Eigen::Index>(c.n_steps());
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd ux(n), uy(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = clamp0(theta[i]);
        const double y = clamp0(theta[n + i]);
        const double zx = normal(rng), zy = normal(rng);
        ux[i] = x + std::sqrt(c.r_model_b * x) * zx;
        uy[i] = y + std::sqrt(c.r_model_b * y) * zy;
    }
    Eigen::VectorXd phi(layout.size());
    Eigen::Index k = 0;
    for (const auto& e : layout.entries) {
        phi[k++] = e.species == Species::kPrey ? ux[e.step] : uy[e.step];
    }
    return phi;
}

}  // namespace

void ObserverConfig::validate(std::size_t n) const {
    auto fail = [](const std::string& m) { throw ConfigError("observer: " + m); };
    if (efficiency_x.size() != n || efficiency_y.size() != n || mask_x.size() != n ||
        mask_y.size() != n) {
        fail("efficiency and mask arrays must all have n_steps = " + std::to_string(n) +
             " entries");
    }
    if (!(std::abs(t_noise) <= 1.0)) fail("|t_noise| must be <= 1");
    if (!(threshold_x > 0.0) || !(threshold_y > 0.0)) fail("thresholds must be positive");
    if (!(r >= 0.0) || !(s_noise >= 0.0) || !(r_model_b >= 0.0)) {
        fail("noise strengths must be nonnegative");
    }
    if (!(x0 >= 0.0) || !(y0 >= 0.0)) fail("initial populations must be nonnegative");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(efficiency_x[i] >= 0.0 && efficiency_x[i] <= 1.0) ||
            !(efficiency_y[i] >= 0.0 && efficiency_y[i] <= 1.0)) {
            fail("efficiency at step " + std::to_string(i) + " outside [0, 1]");
        }
        if ((mask_x[i] != 0 && mask_x[i] != 1) || (mask_y[i] != 0 && mask_y[i] != 1)) {
            fail("mask at step " + std::to_string(i) + " must be 0 or 1");
        }
    }
}

ObserverConfig ObserverConfig::defaults(std::size_t n) {
    ObserverConfig c;
    c.efficiency_x.resize(n);
    c.efficiency_y.resize(n);
    c.mask_x.assign(n, 1);
    c.mask_y.assign(n, 1);
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        const double phase = kTwoPi * static_cast<double>(i) / 25.0;
        c.efficiency_x[i] = 0.8 + 0.2 * std::sin(phase);
        c.efficiency_y[i] = 0.8 + 0.2 * std::sin(phase + std::numbers::pi / 2.0);
    }
    for (std::size_t i = 20; i < 25 && i < n; ++i) c.mask_x[i] = 0;
    for (std::size_t i = 35; i < 40 && i < n; ++i) c.mask_y[i] = 0;
    return c;
}

std::shared_ptr<const DataLayout> DataLayout::from_masks(const std::vector<int>& mask_x,
                                                         const std::vector<int>& mask_y) {
    if (mask_x.size() != mask_y.size()) throw DimensionError("mask lengths differ");
    auto layout = std::make_shared<DataLayout>();
    layout->mask_x = mask_x;
    layout->mask_y = mask_y;
    for (std::size_t i = 0; i < mask_x.size(); ++i) {
        if (mask_x[i] == 1) layout->entries.push_back({Species::kPrey, static_cast<std::uint32_t>(i)});
    }
    for (std::size_t i = 0; i < mask_y.size(); ++i) {
        if (mask_y[i] == 1) {
            layout->entries.push_back({Species::kPredator, static_cast<std::uint32_t>(i)});
        }
    }
    return layout;
}

std::vector<Eigen::Index> DataLayout::full_indices() const {
    const auto n = static_cast<Eigen::Index>(mask_x.size());
    std::vector<Eigen::Index> idx;
    idx.reserve(entries.size());
    for (const auto& e : entries) {
        idx.push_back(e.species == Species::kPrey ? e.step : n + e.step);
    }
    return idx;
}

SignalPair observe_signal(const LatentVector& theta, const ObserverConfig& config) {
    theta.validate();
    check_latent(theta.values, config.n_steps());
    SignalPair s;
    signal_into(theta.values, config, s.x, s.y);
    return s;
}

NoiseDraws sample_noise_model_A(const LatentVector& theta, const ObserverConfig& config,
                                Rng& rng) {
    theta.validate();
    check_latent(theta.values, config.n_steps());
    NoiseDraws out;
    noise_into(theta.values, config, rng, out);
    return out;
}

DataVector censor(const Eigen::VectorXd& u_x, const Eigen::VectorXd& u_y,
                  const ObserverConfig& config) {
    const auto n = static_cast<Eigen::Index>(config.n_steps());
    if (u_x.size() != n || u_y.size() != n) {
        throw DimensionError("censor expects arrays of length n_steps");
    }
    auto layout = DataLayout::from_masks(config.mask_x, config.mask_y);
    return {censor_values(u_x, u_y, *layout, config.threshold_x, config.threshold_y), layout};
}

DataVector simulate_model_A(const LatentVector& theta, const ObserverConfig& config, Rng& rng) {
    theta.validate();
    auto layout = DataLayout::from_masks(config.mask_x, config.mask_y);
    return {model_A_values(theta.values, config, *layout, rng), layout};
}

DataVector simulate_model_B(const LatentVector& theta, const ObserverConfig& config, Rng& rng) {
    theta.validate();
    auto layout = DataLayout::from_masks(config.mask_x, config.mask_y);
    return {model_B_values(theta.values, config, *layout, rng), layout};
}

Observer::Observer(ObserverConfig config) : config_(std::move(config)) {
    config_.validate(config_.n_steps());
    layout_ = DataLayout::from_masks(config_.mask_x, config_.mask_y);
}

Eigen::VectorXd Observer::model_A(const Eigen::VectorXd& theta, Rng& rng) const {
    return model_A_values(theta, config_, *layout_, rng);
}

Eigen::VectorXd Observer::model_B(const Eigen::VectorXd& theta, Rng& rng) const {
    return model_B_values(theta, config_, *layout_, rng);
}

}  // namespace selfisbi
