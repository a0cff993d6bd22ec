#pragma once

#include <cstdint>
#include <random>

namespace eips {

/// mt19937_64 with a fixed bits-to-double mapping so draws agree across
/// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    [[nodiscard]] double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    [[nodiscard]] double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    [[nodiscard]] std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace eips
