#include "selfisbi/lotka_volterra.hpp"

#include "selfisbi/errors.hpp"

#include <cmath>
#include <string>

namespace selfisbi {

void LatentVector::validate() const {
    if (values.size() != 2 * static_cast<Eigen::Index>(n_steps)) {
        throw DimensionError("latent vector has " + std::to_string(values.size()) +
                             " entries, expected 2 * " + std::to_string(n_steps));
    }
}

void validate_params(const ParamVector& omega) {
    if (!omega.allFinite()) {
        throw PreconditionError("parameter vector has non-finite components");
    }
}

namespace {

inline double floor_at_zero(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

LatentVector solve_lv(const ParamVector& omega, double x0, double y0, double dt,
                      std::size_t n_steps) {
    validate_params(omega);
    if (n_steps < 1) throw PreconditionError("solve_lv needs n_steps >= 1");
    if (!(x0 >= 0.0) || !(y0 >= 0.0)) {
        throw PreconditionError("initial populations must be nonnegative");
    }
    const double alpha = omega[0], beta = omega[1], gamma = omega[2], delta = omega[3];
    const auto n = static_cast<Eigen::Index>(n_steps);

    LatentVector out;
    out.n_steps = n_steps;
    out.dt = dt;
    out.values.resize(2 * n);
    double x = x0, y = y0;
    out.values[0] = x;
    out.values[n] = y;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double x_next = x * (1.0 + (alpha - beta * y) * dt);
        const double y_next = y * (1.0 + (delta * x - gamma) * dt);
        if (!std::isfinite(x_next) || !std::isfinite(y_next)) {
            throw SolverDivergence(static_cast<std::size_t>(i + 1),
                                   "Lotka-Volterra solver diverged at step " +
                                       std::to_string(i + 1));
        }
        x = floor_at_zero(x_next);
        y = floor_at_zero(y_next);
        out.values[i + 1] = x;
        out.values[n + i + 1] = y;
    }
    return out;
}

LotkaVolterraMap::LotkaVolterraMap(const SolverSettings& settings) : settings_(settings) {
    if (settings_.n_steps < 1) throw PreconditionError("n_steps must be >= 1");
    if (!(settings_.dt > 0.0)) throw PreconditionError("dt must be positive");
}

LatentVector LotkaVolterraMap::operator()(const ParamVector& omega) const {
    return solve_lv(omega, settings_.x0, settings_.y0, settings_.dt, settings_.n_steps);
}

LatentMap as_latent_map(const LotkaVolterraMap& map) {
    return [map](const Eigen::VectorXd& omega) -> Eigen::VectorXd {
        if (omega.size() != 4) throw DimensionError("Lotka-Volterra map takes 4 parameters");
        return map(ParamVector(omega)).values;
    };
}

}  // namespace selfisbi
