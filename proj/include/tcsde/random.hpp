#pragma once

#include <cstdint>
#include <random>

namespace tcsde {

using RandomStream = std::mt19937_64;

/// Independent stream lanes carved out of one (seed, index) pair.
enum class StreamLane : std::uint64_t {
    Subordinator = 1,
    Wiener = 2,
    Sampling = 3,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream keyed by (seed, index, lane). Results never depend on the order in
/// which streams are created, so trajectories can be processed in any order.
inline RandomStream make_stream(std::uint64_t seed, std::uint64_t index, StreamLane lane) {
    std::uint64_t key = splitmix64(seed);
    key = splitmix64(key ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    key = splitmix64(key ^ static_cast<std::uint64_t>(lane));
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    return RandomStream(seq);
}

}  // namespace tcsde
