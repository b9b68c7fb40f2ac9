#include "selfisbi/param_prior.hpp"

#include "selfisbi/errors.hpp"

namespace selfisbi {

void ParamPrior::validate() const {
    if (!mean.allFinite()) throw PreconditionError("parameter prior mean must be finite");
    if (!(sd.array() > 0.0).all() || !sd.allFinite()) {
        throw PreconditionError("parameter prior standard deviations must be positive");
    }
}

ParamVector ParamPrior::sample(Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    constexpr int kMaxAttempts = 10000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        ParamVector omega;
        for (int j = 0; j < 4; ++j) omega[j] = mean[j] + sd[j] * normal(rng);
        if ((omega.array() >= 0.0).all()) return omega;
    }
    throw PreconditionError("parameter prior puts almost no mass on nonnegative rates");
}

}  // namespace selfisbi
