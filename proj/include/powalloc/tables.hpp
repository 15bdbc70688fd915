// Dense per-state tables over the (battery level, channel index) grid.
#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "powalloc/problem.hpp"

namespace powalloc {

// Rectangular grid indexed by (energy 0..capacity, channel index 1..N),
// energy-major. Value type for solver outputs: StateGrid<double> holds value
// functions, StateGrid<int> holds policies.
template <class T>
class StateGrid {
public:
    StateGrid() = default;

    StateGrid(int num_energy_levels, int num_channels, T init = T{})
        : energy_levels_(checked_dim(num_energy_levels)),
          channels_(checked_dim(num_channels)),
          cells_(static_cast<std::size_t>(num_energy_levels) * num_channels, init) {}

    int num_energy_levels() const { return energy_levels_; }
    int num_channels() const { return channels_; }
    std::size_t size() const { return cells_.size(); }

    T& at(int energy, int channel_index) { return cells_[offset(energy, channel_index)]; }
    const T& at(int energy, int channel_index) const {
        return cells_[offset(energy, channel_index)];
    }

    const std::vector<T>& data() const { return cells_; }
    std::vector<T>& data() { return cells_; }

    bool same_shape(const StateGrid& other) const {
        return energy_levels_ == other.energy_levels_ && channels_ == other.channels_;
    }

    friend bool operator==(const StateGrid&, const StateGrid&) = default;

private:
    static int checked_dim(int d) {
        if (d < 1) throw std::invalid_argument("state grid dimensions must be at least 1x1");
        return d;
    }

    std::size_t offset(int energy, int channel_index) const {
        if (energy < 0 || energy >= energy_levels_ || channel_index < 1 ||
            channel_index > channels_) {
            std::ostringstream msg;
            msg << "state (energy=" << energy << ", channel_index=" << channel_index
                << ") outside grid " << energy_levels_ << "x" << channels_;
            throw std::out_of_range(msg.str());
        }
        return static_cast<std::size_t>(energy) * channels_ + (channel_index - 1);
    }

    int energy_levels_ = 0;
    int channels_ = 0;
    std::vector<T> cells_;
};

using ValueTable = StateGrid<double>;
using PolicyTable = StateGrid<int>;

inline ValueTable make_value_table(const ProblemSpec& spec, double init = 0.0) {
    return ValueTable(spec.num_energy_levels(), spec.num_channels(), init);
}

inline PolicyTable make_policy_table(const ProblemSpec& spec, int init = 0) {
    return PolicyTable(spec.num_energy_levels(), spec.num_channels(), init);
}

inline void require_same_shape(const ValueTable& a, const ValueTable& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("value tables have different shapes");
}

inline double sup_norm_diff(const ValueTable& a, const ValueTable& b) {
    require_same_shape(a, b);
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline bool all_finite(const ValueTable& t) {
    for (double v : t.data())
        if (!std::isfinite(v)) return false;
    return true;
}

// A policy is feasible when it never spends more than is stored.
inline bool is_feasible(const PolicyTable& policy) {
    for (int e = 0; e < policy.num_energy_levels(); ++e)
        for (int h = 1; h <= policy.num_channels(); ++h) {
            int a = policy.at(e, h);
            if (a < 0 || a > e) return false;
        }
    return true;
}

} // namespace powalloc
