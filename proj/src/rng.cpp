#include "qfc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qfc {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

namespace {

std::int64_t poisson_inversion(Rng& rng, double lambda) {
    const double limit = std::exp(-lambda);
    std::int64_t k = 0;
    double p = 1.0;
    do {
        p *= rng.uniform();
        ++k;
    } while (p > limit);
    return k - 1;
}

// Hormann (1993), PTRS transformed rejection for Poisson, valid for
// lambda >= 10.
std::int64_t poisson_ptrs(Rng& rng, double lambda) {
    const double log_lambda = std::log(lambda);
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * log_lambda - lambda - std::lgamma(kf + 1.0)) {
            return static_cast<std::int64_t>(kf);
        }
    }
}

} // namespace

std::int64_t poisson(Rng& rng, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("poisson rate must be finite and >= 0");
    }
    if (lambda == 0.0) return 0;
    if (lambda < 10.0) return poisson_inversion(rng, lambda);
    return poisson_ptrs(rng, lambda);
}

} // namespace qfc
