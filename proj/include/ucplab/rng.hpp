#pragma once

#include <cstdint>

namespace ucplab {

/// Counter-based stream: the state is a pure function of the key triple, so a
/// draw for (seed, realization, site) is identical no matter which thread or
/// in which order it is made.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0) {
        state_ = mix(mix(mix(0x853c49e6748fea9bull ^ seed) + stream) + counter);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace ucplab
