// Discounted-reward solver: Bellman backups, value iteration with a
// contraction-based stopping rule, exact evaluation of a fixed stationary
// policy, and exhaustive policy enumeration for cross-validation on small
// instances.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "powalloc/problem.hpp"
#include "powalloc/tables.hpp"

namespace powalloc {

// Two action values within 1e-9*(1+|best|) of each other count as tied; the
// canonical policy picks the smallest tied power. The largest-maximizer
// variant exists for reporting how tie selection affects policy structure.
enum class TieBreak { smallest, largest };

inline constexpr double kArgmaxTieRelTolerance = 1e-9;

struct BackupResult {
    ValueTable values;
    PolicyTable policy;
};

struct SolveDiagnostics {
    int iterations = 0;
    double final_sup_norm_delta = 0.0;
    double error_bound = 0.0;  // guaranteed sup-norm distance to the fixed point
    double wall_time_seconds = 0.0;
    bool converged = false;
};

struct SolveResult {
    ValueTable values;
    PolicyTable policy;
    SolveDiagnostics diagnostics;
};

namespace detail {

// Per-backup scratch shared by the backup, the policy-evaluation iteration
// and the action-gap report. The kernel factorizes over (next energy,
// next channel), so each backup first marginalizes the channel:
//   W(e') = sum_h P_H(h) J(e', h)
// and then folds the recharge distribution over the residual energy d:
//   U(d)  = sum_x P_X(x) W(min(d + x, capacity)).
// Every action value is then reward + discount * U(energy - power).
struct BackupScratch {
    std::vector<double> channel_marginal;   // W, indexed by next energy
    std::vector<double> residual_expected;  // U, indexed by residual energy
    std::vector<double> reward_table;       // r(h, p), channel-major

    void prepare(const ProblemSpec& spec, const ValueTable& values) {
        const int levels = spec.num_energy_levels();
        const int channels = spec.num_channels();
        channel_marginal.assign(levels, 0.0);
        for (int e = 0; e < levels; ++e) {
            double w = 0.0;
            for (int h = 1; h <= channels; ++h) w += spec.channel_pmf[h - 1] * values.at(e, h);
            channel_marginal[e] = w;
        }
        const int cap = spec.battery_capacity;
        residual_expected.assign(levels, 0.0);
        for (int d = 0; d < levels; ++d) {
            double u = 0.0;
            for (int x = 0; x <= spec.max_recharge(); ++x)
                u += spec.recharge_pmf[x] * channel_marginal[std::min(d + x, cap)];
            residual_expected[d] = u;
        }
        if (reward_table.empty()) {
            reward_table.resize(static_cast<std::size_t>(channels) * levels);
            for (int h = 1; h <= channels; ++h)
                for (int p = 0; p < levels; ++p)
                    reward_table[static_cast<std::size_t>(h - 1) * levels + p] =
                        spec.reward(h, p);
        }
    }

    double reward(int channel_index, int power, int levels) const {
        return reward_table[static_cast<std::size_t>(channel_index - 1) * levels + power];
    }
};

inline void require_spec_shape(const ProblemSpec& spec, const ValueTable& values) {
    if (values.num_energy_levels() != spec.num_energy_levels() ||
        values.num_channels() != spec.num_channels())
        throw std::invalid_argument("value table shape does not match the problem spec");
    if (!all_finite(values))
        throw std::invalid_argument("value table has non-finite entries");
}

inline int pick_tied_action(const std::vector<double>& action_values, int count, double best,
                            TieBreak tie) {
    const double tol = kArgmaxTieRelTolerance * (1.0 + std::abs(best));
    if (tie == TieBreak::smallest) {
        for (int p = 0; p < count; ++p)
            if (action_values[p] >= best - tol) return p;
    } else {
        for (int p = count - 1; p >= 0; --p)
            if (action_values[p] >= best - tol) return p;
    }
    return 0;  // unreachable: best is attained
}

} // namespace detail

/**
 * One exact Bellman backup: for every state, maximizes reward plus
 * discounted expected continuation value over feasible powers, and extracts
 * the maximizing action under the given tie rule.
 */
inline BackupResult bellman_backup(const ProblemSpec& spec, const ValueTable& values,
                                   TieBreak tie = TieBreak::smallest) {
    detail::require_spec_shape(spec, values);
    detail::BackupScratch scratch;
    scratch.prepare(spec, values);

    const int levels = spec.num_energy_levels();
    const int channels = spec.num_channels();
    BackupResult out{make_value_table(spec), make_policy_table(spec)};
    std::vector<double> action_values(levels);
    for (int e = 0; e < levels; ++e) {
        for (int h = 1; h <= channels; ++h) {
            double best = -std::numeric_limits<double>::infinity();
            for (int p = 0; p <= e; ++p) {
                double q = scratch.reward(h, p, levels) +
                           spec.discount * scratch.residual_expected[e - p];
                action_values[p] = q;
                best = std::max(best, q);
            }
            out.values.at(e, h) = best;
            out.policy.at(e, h) = detail::pick_tied_action(action_values, e + 1, best, tie);
        }
    }
    return out;
}

/**
 * Gap between the best and second-best action value in every state, computed
 * against the supplied value table. States whose gap falls below the solver's
 * error bound have an argmax that the convergence error could flip; the
 * structure report flags them. Single-action states get an infinite gap.
 */
inline StateGrid<double> action_value_gaps(const ProblemSpec& spec, const ValueTable& values) {
    detail::require_spec_shape(spec, values);
    detail::BackupScratch scratch;
    scratch.prepare(spec, values);

    const int levels = spec.num_energy_levels();
    StateGrid<double> gaps(levels, spec.num_channels(),
                           std::numeric_limits<double>::infinity());
    for (int e = 0; e < levels; ++e) {
        for (int h = 1; h <= spec.num_channels(); ++h) {
            double best = -std::numeric_limits<double>::infinity();
            double second = -std::numeric_limits<double>::infinity();
            for (int p = 0; p <= e; ++p) {
                double q = scratch.reward(h, p, levels) +
                           spec.discount * scratch.residual_expected[e - p];
                if (q > best) {
                    second = best;
                    best = q;
                } else if (q > second) {
                    second = q;
                }
            }
            if (e >= 1) gaps.at(e, h) = best - second;
        }
    }
    return gaps;
}

/**
 * Value iteration from the all-zero table. Stops once the sup-norm step
 * delta guarantees that the returned table lies within `epsilon` of the
 * fixed point (delta <= epsilon*(1-lambda)/(2*lambda)); the policy comes
 * from the final backup. When max_iterations runs out first, the result is
 * still returned with diagnostics.converged = false.
 */
inline SolveResult value_iteration(const ProblemSpec& spec, double epsilon = 1e-9,
                                   int max_iterations = 200000,
                                   TieBreak tie = TieBreak::smallest) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");

    const auto start = std::chrono::steady_clock::now();
    const double lambda = spec.discount;
    const double stop_delta = epsilon * (1.0 - lambda) / (2.0 * lambda);

    SolveResult result{make_value_table(spec), make_policy_table(spec), {}};
    ValueTable current = make_value_table(spec);  // J0 = 0
    double delta = std::numeric_limits<double>::infinity();
    int k = 0;
    while (k < max_iterations) {
        BackupResult next = bellman_backup(spec, current, tie);
        delta = sup_norm_diff(next.values, current);
        current = std::move(next.values);
        result.policy = std::move(next.policy);
        ++k;
        if (delta <= stop_delta) break;
    }
    result.values = std::move(current);
    result.diagnostics.iterations = k;
    result.diagnostics.final_sup_norm_delta = delta;
    result.diagnostics.error_bound = lambda * delta / (1.0 - lambda);
    result.diagnostics.converged = delta <= stop_delta;
    result.diagnostics.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

namespace detail {

inline void require_feasible_policy(const ProblemSpec& spec, const PolicyTable& policy) {
    if (policy.num_energy_levels() != spec.num_energy_levels() ||
        policy.num_channels() != spec.num_channels())
        throw std::invalid_argument("policy table shape does not match the problem spec");
    if (!is_feasible(policy))
        throw std::invalid_argument("policy is infeasible: some action exceeds stored energy");
}

// Gaussian elimination with partial pivoting on a row-major dense system.
// The policy-evaluation matrix I - lambda*P is strictly diagonally dominant,
// so the solve is well conditioned.
inline std::vector<double> solve_dense(std::vector<double>& a, std::vector<double>& b,
                                       std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double candidate = std::abs(a[r * n + col]);
            if (candidate > best) {
                best = candidate;
                pivot = r;
            }
        }
        if (best == 0.0) throw std::runtime_error("singular policy evaluation system");
        if (pivot != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
            std::swap(b[pivot], b[col]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            double factor = a[r * n + col] * inv;
            if (factor == 0.0) continue;
            a[r * n + col] = 0.0;
            for (std::size_t c = col + 1; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri * n + c] * x[c];
        x[ri] = acc / a[ri * n + ri];
    }
    return x;
}

} // namespace detail

enum class PolicyEvalMethod { automatic, dense, iterative };

/**
 * Exact discounted value of a fixed stationary policy: the unique solution
 * of V = r + lambda * P * V. Small state spaces (<= 2000 states) get a
 * direct dense linear solve; larger ones iterate the policy's backup until
 * the contraction bound guarantees 1e-12.
 */
inline ValueTable evaluate_policy(const ProblemSpec& spec, const PolicyTable& policy,
                                  PolicyEvalMethod method = PolicyEvalMethod::automatic) {
    detail::require_feasible_policy(spec, policy);

    const int levels = spec.num_energy_levels();
    const int channels = spec.num_channels();
    const std::size_t n = static_cast<std::size_t>(levels) * channels;
    if (method == PolicyEvalMethod::automatic)
        method = n <= 2000 ? PolicyEvalMethod::dense : PolicyEvalMethod::iterative;

    const double lambda = spec.discount;

    if (method == PolicyEvalMethod::dense) {
        // state id = energy * channels + (channel_index - 1)
        std::vector<double> a(n * n, 0.0);
        std::vector<double> b(n, 0.0);
        for (int e = 0; e < levels; ++e) {
            for (int h = 1; h <= channels; ++h) {
                const std::size_t row = static_cast<std::size_t>(e) * channels + (h - 1);
                const int p = policy.at(e, h);
                b[row] = spec.reward(h, p);
                a[row * n + row] += 1.0;
                for (int e0 = 0; e0 < levels; ++e0) {
                    double t = transition_prob(spec, e, p, e0);
                    if (t == 0.0) continue;
                    for (int h0 = 1; h0 <= channels; ++h0) {
                        const std::size_t col =
                            static_cast<std::size_t>(e0) * channels + (h0 - 1);
                        a[row * n + col] -= lambda * t * spec.channel_pmf[h0 - 1];
                    }
                }
            }
        }
        std::vector<double> x = detail::solve_dense(a, b, n);
        ValueTable v = make_value_table(spec);
        v.data() = std::move(x);
        return v;
    }

    // Iterative path: repeated policy backups through the factorized kernel.
    detail::BackupScratch scratch;
    ValueTable v = make_value_table(spec);
    const double target = 1e-12;
    const double stop_delta = target * (1.0 - lambda) / lambda;
    for (int iter = 0; iter < 10000000; ++iter) {
        scratch.prepare(spec, v);
        ValueTable next = make_value_table(spec);
        for (int e = 0; e < levels; ++e)
            for (int h = 1; h <= channels; ++h) {
                const int p = policy.at(e, h);
                next.at(e, h) =
                    scratch.reward(h, p, levels) + lambda * scratch.residual_expected[e - p];
            }
        double delta = sup_norm_diff(next, v);
        v = std::move(next);
        if (delta <= stop_delta) break;
    }
    return v;
}

struct BruteForceResult {
    ValueTable values;   // pointwise maximum over all enumerated policies
    PolicyTable policy;  // a policy achieving that maximum everywhere
    long long policies_enumerated = 0;
};

// Number of feasible stationary deterministic policies; infinity-like
// sentinel (-1) when the product overflows the guard.
inline long long feasible_policy_count(const ProblemSpec& spec, long long limit) {
    long long count = 1;
    for (int e = 0; e < spec.num_energy_levels(); ++e) {
        for (int h = 0; h < spec.num_channels(); ++h) {
            count *= (e + 1);
            if (count > limit) return -1;
        }
    }
    return count;
}

/**
 * Independent optimality oracle: enumerates every feasible stationary
 * deterministic policy, evaluates each exactly, and keeps the pointwise
 * maximum. Verifies that a single policy attains the maximum in every state
 * simultaneously, which the theory promises. Refuses instances beyond 1e6
 * policies.
 */
inline BruteForceResult brute_force_optimal(const ProblemSpec& spec) {
    constexpr long long kMaxPolicies = 1000000;
    const long long total = feasible_policy_count(spec, kMaxPolicies);
    if (total < 0) {
        std::ostringstream msg;
        msg << "instance too large for brute force: more than " << kMaxPolicies
            << " feasible policies (state grid " << spec.num_energy_levels() << "x"
            << spec.num_channels() << ")";
        throw std::invalid_argument(msg.str());
    }

    const int levels = spec.num_energy_levels();
    const int channels = spec.num_channels();

    BruteForceResult result{make_value_table(spec, -1.0), make_policy_table(spec), 0};
    PolicyTable candidate = make_policy_table(spec);
    double best_total = -std::numeric_limits<double>::infinity();
    ValueTable best_values = make_value_table(spec);

    // odometer over per-state action choices (state s has e(s)+1 choices)
    PolicyTable policy = make_policy_table(spec);
    bool done = false;
    while (!done) {
        ValueTable v = evaluate_policy(spec, policy);
        ++result.policies_enumerated;
        double total_value = 0.0;
        for (std::size_t i = 0; i < v.data().size(); ++i) {
            result.values.data()[i] = std::max(result.values.data()[i], v.data()[i]);
            total_value += v.data()[i];
        }
        if (total_value > best_total) {
            best_total = total_value;
            candidate = policy;
            best_values = std::move(v);
        }

        // advance the odometer
        done = true;
        for (int e = 0; e < levels && done; ++e) {
            for (int h = 1; h <= channels && done; ++h) {
                int& a = policy.at(e, h);
                if (a < e) {
                    ++a;
                    done = false;
                } else {
                    a = 0;
                }
            }
        }
    }

    // The aggregate-best policy must attain the pointwise maximum everywhere.
    constexpr double kAgreement = 1e-8;
    for (int e = 0; e < levels; ++e)
        for (int h = 1; h <= channels; ++h)
            if (best_values.at(e, h) < result.values.at(e, h) - kAgreement) {
                std::ostringstream msg;
                msg << "no single enumerated policy attains the pointwise maximum at state "
                    << "(energy=" << e << ", channel_index=" << h << "): best-policy value "
                    << best_values.at(e, h) << " vs pointwise max " << result.values.at(e, h);
                throw std::logic_error(msg.str());
            }
    result.policy = std::move(candidate);
    return result;
}

} // namespace powalloc
