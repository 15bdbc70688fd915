// Seeded Monte Carlo rollout of a fixed policy on sampled channel and
// recharge traces. One simulated slot proceeds in a fixed order: observe the
// channel, choose the power, accrue the discounted reward, then the recharge
// arrives and the capacity clip applies.
#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "powalloc/pmf.hpp"
#include "powalloc/problem.hpp"
#include "powalloc/rng.hpp"
#include "powalloc/tables.hpp"

namespace powalloc {

struct TraceConfig {
    int horizon = 1;      // slots per trace
    int n_traces = 1;
    std::uint64_t seed = 0;
    State start;          // slot 0 uses this channel; later slots draw fresh
};

struct SimReport {
    double estimate = 0.0;             // mean discounted return over traces
    double std_error = 0.0;
    double truncation_bias_bound = 0.0;  // lambda^T * R_max / (1 - lambda)
    int n_traces = 0;
    int horizon = 0;
    std::uint64_t seed = 0;
};

// Smallest horizon T whose truncation bias lambda^T * R_max / (1 - lambda)
// falls below `bias`.
inline int horizon_for_bias_bound(const ProblemSpec& spec, double bias) {
    if (!(bias > 0.0)) throw std::invalid_argument("bias bound must be positive");
    const double tail = spec.value_upper_bound();
    int horizon = 1;
    double factor = spec.discount;
    while (factor * tail >= bias) {
        factor *= spec.discount;
        ++horizon;
        if (horizon > 10000000) throw std::runtime_error("bias bound unreachable");
    }
    return horizon;
}

namespace detail {

inline void require_trace_config(const ProblemSpec& spec, const TraceConfig& config) {
    if (config.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (config.n_traces < 1) throw std::invalid_argument("n_traces must be at least 1");
    if (config.start.energy < 0 || config.start.energy > spec.battery_capacity)
        throw std::invalid_argument("start energy " + std::to_string(config.start.energy) +
                                    " outside [0, " + std::to_string(spec.battery_capacity) +
                                    "]");
    if (config.start.channel_index < 1 || config.start.channel_index > spec.num_channels())
        throw std::invalid_argument("start channel_index " +
                                    std::to_string(config.start.channel_index) +
                                    " outside [1, " + std::to_string(spec.num_channels()) + "]");
}

} // namespace detail

/**
 * Discounted return of every trace, in trace order. Trace i draws from its
 * own sub-stream of the seed, so estimates with different trace counts share
 * their common prefix.
 */
inline std::vector<double> simulate_policy_returns(const ProblemSpec& spec,
                                                   const PolicyTable& policy,
                                                   const TraceConfig& config) {
    if (policy.num_energy_levels() != spec.num_energy_levels() ||
        policy.num_channels() != spec.num_channels())
        throw std::invalid_argument("policy table shape does not match the problem spec");
    detail::require_trace_config(spec, config);

    const std::vector<double> channel_cdf = spec.channel_pmf.cumulative();
    const std::vector<double> recharge_cdf = spec.recharge_pmf.cumulative();

    std::vector<double> returns(static_cast<std::size_t>(config.n_traces));
    for (int trace = 0; trace < config.n_traces; ++trace) {
        Rng rng(substream_seed(config.seed, static_cast<std::uint64_t>(trace)));
        int energy = config.start.energy;
        double total = 0.0;
        double discount_factor = 1.0;
        for (int t = 0; t < config.horizon; ++t) {
            const int channel = t == 0 ? config.start.channel_index
                                       : sample_index(channel_cdf, rng.u01()) + 1;
            const int power = policy.at(energy, channel);
            if (power < 0 || power > energy) {
                std::ostringstream msg;
                msg << "policy infeasible at visited state (energy=" << energy
                    << ", channel_index=" << channel << "): power " << power;
                throw std::invalid_argument(msg.str());
            }
            total += discount_factor * spec.reward(channel, power);
            discount_factor *= spec.discount;
            const int recharge = sample_index(recharge_cdf, rng.u01());
            energy = next_energy(energy, power, recharge, spec.battery_capacity);
        }
        returns[static_cast<std::size_t>(trace)] = total;
    }
    return returns;
}

inline SimReport simulate_policy(const ProblemSpec& spec, const PolicyTable& policy,
                                 const TraceConfig& config) {
    const std::vector<double> returns = simulate_policy_returns(spec, policy, config);

    SimReport report;
    report.n_traces = config.n_traces;
    report.horizon = config.horizon;
    report.seed = config.seed;
    report.truncation_bias_bound =
        std::pow(spec.discount, config.horizon) * spec.value_upper_bound();

    double sum = 0.0;
    for (double r : returns) sum += r;
    report.estimate = sum / static_cast<double>(returns.size());
    if (returns.size() > 1) {
        double ss = 0.0;
        for (double r : returns) {
            double d = r - report.estimate;
            ss += d * d;
        }
        report.std_error = std::sqrt(ss / (static_cast<double>(returns.size() - 1) *
                                           static_cast<double>(returns.size())));
    }
    return report;
}

// Comparison baselines; all feasible by construction.

inline PolicyTable spend_all_policy(const ProblemSpec& spec) {
    PolicyTable policy = make_policy_table(spec);
    for (int e = 0; e < policy.num_energy_levels(); ++e)
        for (int h = 1; h <= policy.num_channels(); ++h) policy.at(e, h) = e;
    return policy;
}

inline PolicyTable zero_policy(const ProblemSpec& spec) { return make_policy_table(spec); }

inline PolicyTable fixed_fraction_policy(const ProblemSpec& spec, double fraction) {
    if (!(fraction >= 0.0) || !(fraction <= 1.0))
        throw std::invalid_argument("fraction must lie in [0, 1]");
    PolicyTable policy = make_policy_table(spec);
    for (int e = 0; e < policy.num_energy_levels(); ++e)
        for (int h = 1; h <= policy.num_channels(); ++h)
            policy.at(e, h) = static_cast<int>(std::floor(fraction * e));
    return policy;
}

inline std::string to_text(const SimReport& report) {
    std::ostringstream out;
    out.precision(12);
    out << "traces: " << report.n_traces << "\n"
        << "horizon: " << report.horizon << "\n"
        << "seed: " << report.seed << "\n"
        << "estimate: " << report.estimate << "\n"
        << "std_error: " << report.std_error << "\n"
        << "truncation_bias_bound: " << report.truncation_bias_bound << "\n";
    return out.str();
}

} // namespace powalloc
