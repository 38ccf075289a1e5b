#pragma once

#include <cstdint>
#include <cstddef>

namespace drn {

/// Splitmix64-based generator. Self-contained so that a given seed yields the
/// same stream on every platform, which standard library distributions do not
/// guarantee.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {
        next();
        next();
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), rejection sampled.
    std::size_t below(std::size_t bound) {
        std::uint64_t threshold = (~std::uint64_t(0) / bound) * bound;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= threshold);
        return static_cast<std::size_t>(v % bound);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t state_;
};

}  // namespace drn
