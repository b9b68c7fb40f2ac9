#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace selfisbi {

using Rng = std::mt19937_64;

/// Named random streams. Every draw in the pipeline belongs to exactly one.
enum class Stream : std::uint64_t {
    kMock = 1,
    kEnsemble = 2,
    kLatentPrior = 3,
    kMisspecReference = 4,
    kAbc = 5,
    kTest = 99,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based seed for (root, stream, group, index). The mapping is a pure
/// function, so a simulation's randomness does not depend on which worker ran it.
std::uint64_t derive_seed(std::uint64_t root, Stream stream, std::uint64_t group,
                          std::uint64_t index) noexcept;

inline Rng make_rng(std::uint64_t root, Stream stream, std::uint64_t group,
                    std::uint64_t index) {
    return Rng(derive_seed(root, stream, group, index));
}

inline double standard_normal(Rng& rng) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace selfisbi
