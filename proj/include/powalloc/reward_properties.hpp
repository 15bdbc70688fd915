// Numeric verification that a candidate reward function satisfies the
// conditions under which the monotone-solution guarantees hold:
//   (a) it depends only on (channel value, power), never on battery level --
//       enforced structurally by the callable's signature;
//   (b) it is concave in power;
//   (c) it is non-decreasing in the channel value;
//   (d) its mixed difference in (power, channel value) is non-negative.
// Conditions (b)-(d) are checked by finite differences on caller-supplied
// grids.
#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace powalloc {

struct RewardPropertyReport {
    // (a) holds by construction: the callable receives no battery argument.
    bool independent_of_battery = true;
    bool finite = true;
    bool concave_in_power = true;
    bool monotone_in_channel = true;
    bool mixed_difference_nonnegative = true;

    // Populated with the offending grid location when the matching flag is
    // false; empty otherwise.
    std::string finite_witness;
    std::string concavity_witness;
    std::string monotonicity_witness;
    std::string mixed_witness;

    bool all_pass() const {
        return independent_of_battery && finite && concave_in_power && monotone_in_channel &&
               mixed_difference_nonnegative;
    }
};

namespace detail {

inline std::string grid_point(double channel_value, int power) {
    std::ostringstream s;
    s << "(channel value " << channel_value << ", power " << power << ")";
    return s.str();
}

} // namespace detail

template <class RewardFn>
RewardPropertyReport check_reward_properties(const RewardFn& reward,
                                             const std::vector<double>& channel_grid,
                                             const std::vector<int>& power_grid,
                                             double tolerance = 1e-9) {
    if (channel_grid.size() < 3 || power_grid.size() < 3)
        throw std::invalid_argument("reward property grids need at least 3 points each");
    for (std::size_t i = 1; i < channel_grid.size(); ++i)
        if (!(channel_grid[i] > channel_grid[i - 1]))
            throw std::invalid_argument("channel grid must be strictly increasing");
    for (std::size_t i = 1; i < power_grid.size(); ++i)
        if (!(power_grid[i] > power_grid[i - 1]))
            throw std::invalid_argument("power grid must be strictly increasing");

    const int nh = static_cast<int>(channel_grid.size());
    const int np = static_cast<int>(power_grid.size());

    RewardPropertyReport report;

    // Tabulate once; bail out on the first non-finite value.
    std::vector<double> r(static_cast<std::size_t>(nh) * np);
    for (int j = 0; j < nh; ++j) {
        for (int i = 0; i < np; ++i) {
            double v = reward(channel_grid[j], power_grid[i]);
            if (!std::isfinite(v)) {
                report.finite = false;
                report.finite_witness =
                    "non-finite reward at " + detail::grid_point(channel_grid[j], power_grid[i]);
                return report;
            }
            r[static_cast<std::size_t>(j) * np + i] = v;
        }
    }
    auto value = [&](int j, int i) { return r[static_cast<std::size_t>(j) * np + i]; };

    // (b) slopes along power non-increasing; handles non-uniform integer grids
    for (int j = 0; j < nh && report.concave_in_power; ++j) {
        for (int i = 0; i + 2 < np; ++i) {
            double s0 = (value(j, i + 1) - value(j, i)) /
                        static_cast<double>(power_grid[i + 1] - power_grid[i]);
            double s1 = (value(j, i + 2) - value(j, i + 1)) /
                        static_cast<double>(power_grid[i + 2] - power_grid[i + 1]);
            if (s1 > s0 + tolerance) {
                report.concave_in_power = false;
                std::ostringstream w;
                w << "slope rises from " << s0 << " to " << s1 << " at "
                  << detail::grid_point(channel_grid[j], power_grid[i]) << " across powers "
                  << power_grid[i] << ".." << power_grid[i + 2];
                report.concavity_witness = w.str();
                break;
            }
        }
    }

    // (c) non-decreasing in channel value at every power
    for (int i = 0; i < np && report.monotone_in_channel; ++i) {
        for (int j = 0; j + 1 < nh; ++j) {
            if (value(j + 1, i) < value(j, i) - tolerance) {
                report.monotone_in_channel = false;
                std::ostringstream w;
                w << "reward drops from " << value(j, i) << " to " << value(j + 1, i)
                  << " between channel values " << channel_grid[j] << " and "
                  << channel_grid[j + 1] << " at power " << power_grid[i];
                report.monotonicity_witness = w.str();
                break;
            }
        }
    }

    // (d) increments in power grow (weakly) with the channel value
    for (int j = 0; j + 1 < nh && report.mixed_difference_nonnegative; ++j) {
        for (int i = 0; i + 1 < np; ++i) {
            double low = value(j, i + 1) - value(j, i);
            double high = value(j + 1, i + 1) - value(j + 1, i);
            if (high < low - tolerance) {
                report.mixed_difference_nonnegative = false;
                std::ostringstream w;
                w << "power increment shrinks from " << low << " to " << high
                  << " between channel values " << channel_grid[j] << " and "
                  << channel_grid[j + 1] << " across powers " << power_grid[i] << ".."
                  << power_grid[i + 1];
                report.mixed_witness = w.str();
                break;
            }
        }
    }

    return report;
}

} // namespace powalloc
