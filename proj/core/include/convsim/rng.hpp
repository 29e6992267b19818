#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "convsim/bytes.hpp"

namespace convsim {

// Deterministic generator owned by the caller. Every random decision in the
// library (key material, nonces, backoff slots, traffic schedules) draws from
// one of these; nothing reads global entropy. Floating-point draws avoid
// std::uniform_real_distribution so the stream is identical across standard
// library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi] inclusive.
    uint64_t uniform_int(uint64_t lo, uint64_t hi) {
        if (hi <= lo) return lo;
        uint64_t span = hi - lo + 1;
        return lo + next_u64() % span;
    }

    double exponential(double mean);

    Bytes bytes(size_t n);

    // Stable stream derivation: mixes a parent seed with a label so
    // subsystems get independent streams that do not depend on call order.
    static uint64_t derive_seed(uint64_t parent, std::string_view label);

private:
    std::mt19937_64 gen_;
};

}  // namespace convsim
