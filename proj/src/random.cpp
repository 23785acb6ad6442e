#include "rssvar/random.hpp"

#include <cmath>
#include <numbers>

namespace rssvar {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double RandomStream::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    const double u1 = 1.0 - uniform01(); // (0, 1], keeps the log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

std::size_t RandomStream::uniform_index(std::size_t bound) {
    // bounds here are tiny, so the 2^-53 truncation bias is irrelevant
    auto idx = static_cast<std::size_t>(uniform01() * static_cast<double>(bound));
    return idx < bound ? idx : bound - 1;
}

} // namespace rssvar
