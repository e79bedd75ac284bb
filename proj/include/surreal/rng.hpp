#pragma once

#include <cstdint>
#include <random>

namespace surreal {

/// Seeded random stream with portable draw semantics.
///
/// std::mt19937_64 output is fully specified by the standard, but the
/// standard distributions are not. All draws here are built directly on
/// the raw engine words so that a given (seed, draw sequence) produces
/// identical values on every platform.
class Rng {
public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 bits of entropy.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n). n must be > 0. Consumes exactly one draw.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    /// True with probability p. Always consumes exactly one draw, so the
    /// stream position does not depend on p.
    bool bernoulli(double p) { return uniform() < p; }

    bool operator==(const Rng& other) const { return engine_ == other.engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace surreal
