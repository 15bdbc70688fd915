// Seedable random number utilities with a fixed, library-independent mapping
// from raw engine output to doubles and bounded integers, so that every run
// with the same seed produces the same draws on every platform.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace powalloc {

namespace detail {

// splitmix64 finalizer; used to derive independent sub-stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

// Seed for the i-th sub-stream of a master seed. Streams are stable under
// changes to the total stream count (stream i never depends on n).
inline std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
    return detail::mix64(master_seed ^ detail::mix64(stream_index + 1));
}

// mt19937_64 with hand-rolled conversions. std::*_distribution is not
// reproducible across standard libraries; these mappings are.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform integer in [lo, hi] inclusive
    int uniform_int(int lo, int hi) {
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(engine_() % span);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // Exp(1), strictly positive
    double exponential() {
        double u;
        do {
            u = u01();
        } while (u <= 0.0);
        return -std::log(u);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace powalloc
