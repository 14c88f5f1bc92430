#ifndef PLCAUTO_CORE_RNG_HPP
#define PLCAUTO_CORE_RNG_HPP

#include <cstdint>
#include <random>

namespace plcauto {

/// Deterministic random source. mt19937_64 output is pinned by the standard
/// and the derived draws below avoid std::uniform_real_distribution, whose
/// results are implementation-defined; equal seeds give equal streams on
/// every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 bits of resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(engine_() % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace plcauto

#endif
