#pragma once

#include <cstdint>
#include <random>

namespace covcpd {

// Seeded generator used everywhere randomness is needed. All draws go
// through explicit transforms (no std::*_distribution) so a given seed
// produces the same byte stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer on {0, ..., bound-1}, rejection sampled (no modulo bias).
    std::uint64_t below(std::uint64_t bound);

    // Uniform integer on {lo, ..., hi} inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // Standard normal via Box-Muller; the second draw of each pair is cached.
    double normal();

    double rademacher() { return (engine_() & 1u) ? 1.0 : -1.0; }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Child seed for unit-of-work `index` under master `seed` (SplitMix64
// finalizer over the pair). This is the rule that makes every trial of a
// sweep replayable in isolation from its row's seed column.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace covcpd
