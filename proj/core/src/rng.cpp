#include "convsim/rng.hpp"

#include <cmath>

namespace convsim {

double Rng::exponential(double mean) {
    // Inverse CDF; clamp away from u == 1 to keep log() finite.
    double u = uniform();
    if (u > 0.999999999999) u = 0.999999999999;
    return -mean * std::log(1.0 - u);
}

Bytes Rng::bytes(size_t n) {
    Bytes out(n);
    size_t i = 0;
    while (i < n) {
        uint64_t v = next_u64();
        for (int s = 56; s >= 0 && i < n; s -= 8) out[i++] = static_cast<uint8_t>(v >> s);
    }
    return out;
}

uint64_t Rng::derive_seed(uint64_t parent, std::string_view label) {
    // FNV-1a over the label, then splitmix-style finalization with the
    // parent seed. std::hash is not stable across implementations.
    uint64_t h = 1469598103934665603ull;
    for (char c : label) {
        h ^= static_cast<uint8_t>(c);
        h *= 1099511628211ull;
    }
    uint64_t z = parent + 0x9e3779b97f4a7c15ull + h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace convsim
