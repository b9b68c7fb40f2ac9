#pragma once

#include "selfisbi/lotka_volterra.hpp"
#include "selfisbi/random.hpp"

namespace selfisbi {

/// Gaussian prior on the top-level parameters with diagonal covariance.
struct ParamPrior {
    ParamVector mean = ParamVector(0.5768, 0.1963, 0.1968, 0.0484);
    ParamVector sd = ParamVector(0.0173, 0.0059, 0.0059, 0.0015);

    /// Throws PreconditionError unless the mean is finite and every sd is positive.
    void validate() const;
    Eigen::Matrix4d covariance() const { return sd.array().square().matrix().asDiagonal(); }

    /// One draw; draws with a negative component lie outside the solver's domain and
    /// are redrawn from the same stream.
    ParamVector sample(Rng& rng) const;
};

}  // namespace selfisbi
