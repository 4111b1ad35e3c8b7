#pragma once

#include <cstdint>
#include <random>

namespace renewcast {

/// Seeded random state. Streams derived from (seed, index) are independent
/// of how work is split across threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    /// Stream for one unit of work (a path, a series) under a base seed.
    static Rng stream(std::uint64_t seed, std::uint64_t index);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }
    /// Exponential with the given mean.
    double exponential(double mean);
    std::uint64_t next() { return engine_(); }

    using result_type = std::mt19937_64::result_type;
    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive stream seeds.
std::uint64_t mix64(std::uint64_t x);

enum class Execution { serial, parallel };

}  // namespace renewcast
