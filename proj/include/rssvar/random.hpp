#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace rssvar {

// SplitMix64 finalizer. Used to turn structured inputs (seed, scenario id,
// replication index) into well-separated stream seeds.
std::uint64_t mix64(std::uint64_t z);

// Deterministic random stream. Every variate is derived from the mt19937_64
// bit stream through fixed arithmetic, so a seed reproduces the same values
// on any conforming platform (std::normal_distribution and friends are
// implementation-defined and are deliberately not used).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // uniform on [0, 1) with 53 random bits
    double uniform01();

    // standard normal via Box-Muller; pairs are generated, the second value
    // is cached for the next call
    double normal();

    // uniform on {0, ..., bound-1}, bound >= 1
    std::size_t uniform_index(std::size_t bound);

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

} // namespace rssvar
