#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace firecast {

// All randomness in the toolkit flows from one root seed through named
// sub-streams, so data generation, parameter init, training and sampling
// stay reproducible independently of each other.
uint64_t splitmix64(uint64_t x);

// Derive an independent stream seed from (seed, name).
uint64_t derive_seed(uint64_t seed, std::string_view name);

// Derive a stream seed from (seed, name, index), e.g. per tree-node streams.
uint64_t derive_seed(uint64_t seed, std::string_view name, uint64_t index);

class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

    // Uniform integer in [lo, hi] inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        return std::uniform_int_distribution<int64_t>(lo, hi)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace firecast
