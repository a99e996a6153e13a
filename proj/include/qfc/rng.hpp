// Deterministic random sampling. Replay is part of the product contract, so
// the Poisson sampler is implemented here rather than taken from
// std::poisson_distribution (whose stream is implementation-defined):
// sequential inversion below lambda = 10, Hormann's PTRS transformed
// rejection above. Sub-seeds derive from (master, index) with SplitMix64 so
// sharded work is independent of scheduling order.

#pragma once

#include <cstdint>
#include <random>

namespace qfc {

std::uint64_t splitmix64(std::uint64_t x);

// Stable per-task seed from a master seed and a task index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::uint64_t bits() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

// Poisson draw with the documented two-regime algorithm above.
std::int64_t poisson(Rng& rng, double lambda);

} // namespace qfc
