// Problem definition for discounted power allocation from a finite
// rechargeable battery over an i.i.d. fading channel: battery dynamics,
// transmission reward, and the one-step transition kernel.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "powalloc/pmf.hpp"

namespace powalloc {

// Battery level together with the observed channel index (1-based).
struct State {
    int energy = 0;
    int channel_index = 1;

    friend bool operator==(const State&, const State&) = default;
};

/**
 * A full problem instance. Plain value type; immutable by convention after
 * validate() has been called. All solver/simulation entry points expect a
 * validated spec.
 *
 * The reward defaults to natural-log spectral efficiency
 * log(1 + channel_value * power / noise). Any replacement callable of
 * (channel value, power) may be installed via reward_fn; it should satisfy
 * the conditions verified by check_reward_properties, otherwise the
 * structural guarantees on the solution no longer apply.
 */
struct ProblemSpec {
    int battery_capacity = 0;            // maximum storable energy units
    Pmf recharge_pmf;                    // energy arrival per slot, over {0..a}
    std::vector<double> channel_states;  // strictly increasing, all positive
    Pmf channel_pmf;                     // position k is channel index k+1
    double noise = 1.0;                  // noise spectral density, > 0
    double discount = 0.9;               // in (0,1)

    // Optional reward plug-in r(channel_value, power); empty means built-in log.
    std::function<double(double, int)> reward_fn;

    int num_channels() const { return static_cast<int>(channel_states.size()); }
    int num_energy_levels() const { return battery_capacity + 1; }
    int max_recharge() const { return recharge_pmf.max_index(); }
    long long state_count() const {
        return static_cast<long long>(num_energy_levels()) * num_channels();
    }

    // Throws std::invalid_argument naming the offending field.
    void validate() const {
        if (battery_capacity < 0)
            throw std::invalid_argument("battery_capacity: must be >= 0, got " +
                                        std::to_string(battery_capacity));
        if (recharge_pmf.empty())
            throw std::invalid_argument("recharge_pmf: must be non-empty");
        if (channel_states.empty())
            throw std::invalid_argument("channel_states: must be non-empty");
        for (std::size_t i = 0; i < channel_states.size(); ++i) {
            if (!(channel_states[i] > 0.0)) {
                std::ostringstream msg;
                msg << "channel_states: entry " << i << " must be positive, got "
                    << channel_states[i];
                throw std::invalid_argument(msg.str());
            }
            if (i > 0 && !(channel_states[i] > channel_states[i - 1])) {
                std::ostringstream msg;
                msg << "channel_states: must be strictly increasing, entries " << i - 1
                    << " and " << i << " are " << channel_states[i - 1] << ", "
                    << channel_states[i];
                throw std::invalid_argument(msg.str());
            }
        }
        if (channel_pmf.empty())
            throw std::invalid_argument("channel_pmf: must be non-empty");
        if (channel_pmf.size() != num_channels()) {
            std::ostringstream msg;
            msg << "channel_pmf: has " << channel_pmf.size() << " entries but there are "
                << num_channels() << " channel states";
            throw std::invalid_argument(msg.str());
        }
        if (!(noise > 0.0))
            throw std::invalid_argument("noise: must be positive, got " + std::to_string(noise));
        if (!(discount > 0.0) || !(discount < 1.0))
            throw std::invalid_argument("discount: must lie strictly between 0 and 1, got " +
                                        std::to_string(discount));
    }

    // Non-fatal oddities worth surfacing to the user.
    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        for (int k = 0; k < channel_pmf.size(); ++k) {
            if (channel_pmf[k] == 0.0) {
                std::ostringstream msg;
                msg << "channel_pmf: channel index " << k + 1
                    << " has zero probability; its states are unreachable";
                w.push_back(msg.str());
            }
        }
        return w;
    }

    double channel_value(int channel_index) const {
        if (channel_index < 1 || channel_index > num_channels()) {
            std::ostringstream msg;
            msg << "channel_index " << channel_index << " out of range [1, " << num_channels()
                << "]";
            throw std::invalid_argument(msg.str());
        }
        return channel_states[static_cast<std::size_t>(channel_index - 1)];
    }

    double channel_probability(int channel_index) const {
        if (channel_index < 1 || channel_index > num_channels()) {
            std::ostringstream msg;
            msg << "channel_index " << channel_index << " out of range [1, " << num_channels()
                << "]";
            throw std::invalid_argument(msg.str());
        }
        return channel_pmf[channel_index - 1];
    }

    // Per-slot reward of transmitting `power` units on the given channel.
    // Independent of the battery level by construction.
    double reward(int channel_index, int power) const {
        double value = channel_value(channel_index);
        if (power < 0)
            throw std::invalid_argument("power must be non-negative, got " +
                                        std::to_string(power));
        if (reward_fn) return reward_fn(value, power);
        return std::log1p(value * static_cast<double>(power) / noise);
    }

    // Largest single-slot reward over the state/action grid. Equals
    // reward(N, battery_capacity) for the built-in log reward, but scans the
    // grid so reward plug-ins that are not monotone in power stay covered.
    double max_reward() const {
        double m = 0.0;
        for (int h = 1; h <= num_channels(); ++h)
            for (int p = 0; p <= battery_capacity; ++p) m = std::max(m, reward(h, p));
        return m;
    }

    // Geometric bound on any discounted return.
    double value_upper_bound() const { return max_reward() / (1.0 - discount); }
};

/**
 * Battery level at the start of the next slot: spend `power`, receive
 * `recharge`, clip at capacity. Spending more than is stored is rejected.
 */
inline int next_energy(int energy, int power, int recharge, int capacity) {
    if (capacity < 0) throw std::invalid_argument("capacity must be >= 0");
    if (energy < 0 || energy > capacity)
        throw std::invalid_argument("energy " + std::to_string(energy) +
                                    " outside [0, " + std::to_string(capacity) + "]");
    if (power < 0) throw std::invalid_argument("power must be non-negative");
    if (power > energy)
        throw std::invalid_argument("power " + std::to_string(power) + " exceeds stored energy " +
                                    std::to_string(energy));
    if (recharge < 0) throw std::invalid_argument("recharge must be non-negative");
    return std::min(energy - power + recharge, capacity);
}

/**
 * P{next battery level | current level, power}. Depends on (energy, power)
 * only through the residual energy - power; the channel component of the
 * full kernel is the channel pmf itself since fades are i.i.d.
 *
 * Below capacity this is the probability of the single recharge amount that
 * lands exactly on next_energy_level; at capacity it is the tail probability
 * of every recharge that clips.
 */
inline double transition_prob(const ProblemSpec& spec, int energy, int power,
                              int next_energy_level) {
    const int cap = spec.battery_capacity;
    if (energy < 0 || energy > cap)
        throw std::invalid_argument("energy " + std::to_string(energy) + " outside [0, " +
                                    std::to_string(cap) + "]");
    if (power < 0 || power > energy)
        throw std::invalid_argument("power " + std::to_string(power) +
                                    " infeasible at energy " + std::to_string(energy));
    if (next_energy_level < 0 || next_energy_level > cap)
        throw std::invalid_argument("next_energy_level " + std::to_string(next_energy_level) +
                                    " outside [0, " + std::to_string(cap) + "]");
    const int residual = energy - power;
    if (next_energy_level < cap) {
        const int needed = next_energy_level - residual;
        if (needed < 0 || needed > spec.max_recharge()) return 0.0;
        return spec.recharge_pmf[needed];
    }
    return spec.recharge_pmf.tail_from(cap - residual);
}

} // namespace powalloc
