#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ctxcent::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// SplitMix64 finalizer (Vigna). Bijective, so distinct inputs never collide.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stable seed for the work item addressed by `path` under a master seed.
// Depends only on (master, path), never on execution order, so work items
// can run concurrently and still reproduce bit-for-bit.
inline std::uint64_t derive(std::uint64_t master,
                            std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix(master);
    for (std::uint64_t component : path)
        s = mix(s ^ mix(component));
    return s;
}

inline std::mt19937_64 engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

// SplitMix64 stream: cheap to construct, so suited to workloads that spin
// up one deterministic stream per short simulation run.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // 53-bit uniform in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

inline double uniform01(std::mt19937_64& gen) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen);
}

inline double normal(std::mt19937_64& gen, double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(gen);
}

// Uniform integer in [0, bound).
inline std::uint64_t below(std::mt19937_64& gen, std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(gen);
}

} // namespace ctxcent::rng
