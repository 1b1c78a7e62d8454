#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "conefp/positive_vector.hpp"

namespace conefp {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic per-task random stream: every independent task (random
/// start, property trial) derives its own engine from (seed, stream id),
/// so results do not depend on scheduling or evaluation order.
class SubstreamRng {
public:
    SubstreamRng(std::uint64_t seed, std::uint64_t stream)
        : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1))) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return std::uniform_int_distribution<int>(lo, hi)(engine_);
    }

    bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }

    std::mt19937_64& engine() { return engine_; }

    /// Random interior point exp(u), u uniform on [-1,1]^n. Sampling in log
    /// coordinates matches the multiplicative geometry of the cone.
    PositiveVector interior_point(int n) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& e : v) e = std::exp(uniform(-1.0, 1.0));
        return PositiveVector(std::move(v));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace conefp
