#pragma once

#include <cstdint>
#include <random>

#include "gvar/math/normal.hpp"

namespace gvar {

/// Seeded random source with fixed, engine-only use of <random> so that the
/// produced streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw on the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via inverse-CDF sampling.
    double normal() { return norm_quantile(uniform01()); }

    std::uint64_t next_seed() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace gvar
