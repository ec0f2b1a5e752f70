#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace blcn {

// Seedable deterministic generator, identical stream across platforms.
//
// The core engine is std::mt19937_64 (its output sequence is pinned by the
// C++ standard); all distributions are derived here from raw 64-bit words,
// never from std::*_distribution, whose sequences are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Independent named stream derived from a master seed, so e.g. "init",
    // "shuffle" and "synth" randomness can be varied independently.
    static Rng substream(std::uint64_t master_seed, std::string_view name);

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    // Box-Muller; consumes exactly two uniforms per draw.
    double normal(double mean, double stddev);

    // Unbiased integer in [0, n), n >= 1.
    std::uint64_t bounded(std::uint64_t n);

    // Fisher-Yates with this generator (std::shuffle is not portable).
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace blcn
