#pragma once

#include <cstdint>
#include <random>

namespace dmc {

// Deterministic random stream. Every stochastic operation in the library
// takes an explicit seed and documents the order in which it draws from
// the stream, so identical seeds reproduce identical results.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1).
    double next_unit() {
        return (next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_unit() < p; }

    bool fair_coin() { return bernoulli(0.5); }

    // Uniform index in [0, n), unbiased via rejection.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return static_cast<std::size_t>(v % n);
    }

    // Derive an independent substream seed from a parent seed and a stream
    // index (splitmix64 finalizer over the combined words).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace dmc
