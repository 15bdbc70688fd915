// Seeded random problem instances for property tests and structural sweeps.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "powalloc/pmf.hpp"
#include "powalloc/problem.hpp"
#include "powalloc/rng.hpp"

namespace powalloc {

struct InstanceBounds {
    int max_capacity = 20;
    int max_channels = 8;
    int max_recharge = 25;
};

inline Pmf random_simplex_pmf(Rng& rng, int size) {
    // i.i.d. Exp(1) weights normalized: uniform on the probability simplex
    std::vector<double> w(static_cast<std::size_t>(size));
    for (double& x : w) x = rng.exponential();
    return Pmf::from_weights(w);
}

// Draws a full validated instance: sizes uniform within bounds, pmfs uniform
// on the simplex, discount uniform in [0.1, 0.95], channel states built from
// positive gaps so they are strictly increasing.
inline ProblemSpec random_problem_spec(Rng& rng, const InstanceBounds& bounds) {
    if (bounds.max_capacity < 1 || bounds.max_channels < 1 || bounds.max_recharge < 0)
        throw std::invalid_argument("instance bounds must allow at least one state");

    ProblemSpec spec;
    spec.battery_capacity = rng.uniform_int(1, bounds.max_capacity);
    const int channels = rng.uniform_int(1, bounds.max_channels);
    spec.channel_states.resize(static_cast<std::size_t>(channels));
    double level = 0.0;
    for (int i = 0; i < channels; ++i) {
        level += rng.uniform(0.25, 4.0);
        spec.channel_states[static_cast<std::size_t>(i)] = level;
    }
    spec.channel_pmf = random_simplex_pmf(rng, channels);
    const int max_recharge = rng.uniform_int(0, bounds.max_recharge);
    spec.recharge_pmf = random_simplex_pmf(rng, max_recharge + 1);
    spec.noise = rng.uniform(0.5, 20.0);
    spec.discount = rng.uniform(0.1, 0.95);
    spec.validate();
    return spec;
}

} // namespace powalloc
