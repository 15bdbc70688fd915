// Canonical distribution families used by the experiment configurations.
// The linear ramps and the binomial bell are this project's fixed
// constructions for "decreasing", "increasing" and "bell-shaped" inputs.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "powalloc/pmf.hpp"

namespace powalloc {

// p_i proportional to size - i over positions 0..size-1
inline Pmf decreasing_pmf(int size) {
    if (size < 1) throw std::invalid_argument("pmf size must be at least 1");
    std::vector<double> w(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) w[static_cast<std::size_t>(i)] = static_cast<double>(size - i);
    return Pmf::from_weights(w);
}

// exact mirror of decreasing_pmf: p_i proportional to i + 1
inline Pmf increasing_pmf(int size) {
    if (size < 1) throw std::invalid_argument("pmf size must be at least 1");
    std::vector<double> w(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) w[static_cast<std::size_t>(i)] = static_cast<double>(i + 1);
    return Pmf::from_weights(w);
}

// Binomial(size-1, 1/2) over positions 0..size-1; Pascal's row keeps the
// weights exact in double for every practical size.
inline Pmf bell_pmf(int size) {
    if (size < 1) throw std::invalid_argument("pmf size must be at least 1");
    std::vector<double> w(static_cast<std::size_t>(size), 1.0);
    for (int row = 1; row < size; ++row)
        for (int i = row - 1; i > 0; --i) w[static_cast<std::size_t>(i)] += w[i - 1];
    return Pmf::from_weights(w);
}

inline Pmf uniform_pmf(int size) {
    if (size < 1) throw std::invalid_argument("pmf size must be at least 1");
    return Pmf::from_weights(std::vector<double>(static_cast<std::size_t>(size), 1.0));
}

// Dispatcher over the named families; "explicit" validates the caller's
// probabilities as-is (no renormalization).
inline Pmf build_named_pmf(const std::string& name, int size,
                           const std::vector<double>& explicit_probabilities = {}) {
    if (name == "decreasing") return decreasing_pmf(size);
    if (name == "increasing") return increasing_pmf(size);
    if (name == "bell") return bell_pmf(size);
    if (name == "uniform") return uniform_pmf(size);
    if (name == "explicit") {
        if (static_cast<int>(explicit_probabilities.size()) != size)
            throw std::invalid_argument("explicit pmf has " +
                                        std::to_string(explicit_probabilities.size()) +
                                        " entries, expected " + std::to_string(size));
        return Pmf(explicit_probabilities);
    }
    throw std::invalid_argument("unknown pmf kind '" + name +
                                "' (expected decreasing|increasing|bell|uniform|explicit)");
}

} // namespace powalloc
