// Executable checks of the structural guarantees on solved instances: a
// monotone value function in both state coordinates, concavity of the value
// in stored energy, the implied submodularity inequality, and a monotone
// optimal policy. Every failed check carries a concrete witness that can be
// re-evaluated to reproduce the violation.
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "powalloc/problem.hpp"
#include "powalloc/solver.hpp"
#include "powalloc/tables.hpp"

namespace powalloc {

// Witness for a monotonicity violation of a value table: the value at `hi`
// fell more than the tolerance below the value at `lo`, with hi >= lo
// coordinate-wise.
struct MonotoneValueWitness {
    State lo;
    State hi;
    double value_lo = 0.0;
    double value_hi = 0.0;

    std::string describe() const {
        std::ostringstream s;
        s << "value drops from " << value_lo << " at (energy=" << lo.energy
          << ", channel_index=" << lo.channel_index << ") to " << value_hi << " at (energy="
          << hi.energy << ", channel_index=" << hi.channel_index << ")";
        return s.str();
    }
};

// Second difference along energy exceeded the tolerance at (energy..energy+2).
struct ConcavityWitness {
    int energy = 0;
    int channel_index = 1;
    double second_difference = 0.0;

    std::string describe() const {
        std::ostringstream s;
        s << "second difference " << second_difference << " > 0 across energies " << energy
          << ".." << energy + 2 << " at channel_index=" << channel_index;
        return s.str();
    }
};

// Quadruple x <= w <= z <= y with x+y = w+z whose outer value sum exceeded
// the inner one.
struct SubmodularityWitness {
    int x = 0, w = 0, z = 0, y = 0;
    int channel_index = 1;
    double outer_sum = 0.0;
    double inner_sum = 0.0;

    std::string describe() const {
        std::ostringstream s;
        s << "J(" << x << ")+J(" << y << ") = " << outer_sum << " exceeds J(" << w << ")+J("
          << z << ") = " << inner_sum << " at channel_index=" << channel_index;
        return s.str();
    }
};

struct MonotonePolicyWitness {
    State lo;
    State hi;
    int action_lo = 0;
    int action_hi = 0;

    std::string describe() const {
        std::ostringstream s;
        s << "power drops from " << action_lo << " at (energy=" << lo.energy
          << ", channel_index=" << lo.channel_index << ") to " << action_hi << " at (energy="
          << hi.energy << ", channel_index=" << hi.channel_index << ")";
        return s.str();
    }
};

template <class Witness>
struct Check {
    bool pass = true;
    std::optional<Witness> witness;

    std::string describe() const { return pass ? "pass" : witness->describe(); }
};

struct MonotoneValueCheck {
    Check<MonotoneValueWitness> channel;  // non-decreasing in channel index
    Check<MonotoneValueWitness> energy;   // non-decreasing in stored energy

    bool pass() const { return channel.pass && energy.pass; }
};

struct MonotonePolicyCheck {
    Check<MonotonePolicyWitness> channel;
    Check<MonotonePolicyWitness> energy;

    bool pass() const { return channel.pass && energy.pass; }
};

// Value non-decreasing in both coordinates; adjacent pairs suffice.
inline MonotoneValueCheck check_monotone_value(const ValueTable& values, double tolerance) {
    MonotoneValueCheck check;
    for (int e = 0; e < values.num_energy_levels() && check.channel.pass; ++e) {
        for (int h = 1; h + 1 <= values.num_channels(); ++h) {
            double lo = values.at(e, h);
            double hi = values.at(e, h + 1);
            if (hi < lo - tolerance) {
                check.channel.pass = false;
                check.channel.witness = MonotoneValueWitness{{e, h}, {e, h + 1}, lo, hi};
                break;
            }
        }
    }
    for (int h = 1; h <= values.num_channels() && check.energy.pass; ++h) {
        for (int e = 0; e + 1 < values.num_energy_levels(); ++e) {
            double lo = values.at(e, h);
            double hi = values.at(e + 1, h);
            if (hi < lo - tolerance) {
                check.energy.pass = false;
                check.energy.witness = MonotoneValueWitness{{e, h}, {e + 1, h}, lo, hi};
                break;
            }
        }
    }
    return check;
}

// Discrete concavity in energy per channel: increments J(e+1)-J(e) must be
// non-increasing, i.e. every second difference stays below the tolerance.
inline Check<ConcavityWitness> check_concave_value(const ValueTable& values, double tolerance) {
    Check<ConcavityWitness> check;
    for (int h = 1; h <= values.num_channels(); ++h) {
        for (int e = 0; e + 2 < values.num_energy_levels(); ++e) {
            double second =
                values.at(e + 2, h) - 2.0 * values.at(e + 1, h) + values.at(e, h);
            if (second > tolerance) {
                check.pass = false;
                check.witness = ConcavityWitness{e, h, second};
                return check;
            }
        }
    }
    return check;
}

// Redundant oracle for the inequality implied by concavity:
// J(x)+J(y) <= J(w)+J(z) whenever x <= w <= z <= y and x+y = w+z. Iterating
// quadruples (x, x+d, y-d, y) with 0 <= d <= (y-x)/2 covers every
// constrained quadruple without repeats.
inline Check<SubmodularityWitness> check_submodularity(const ValueTable& values,
                                                       double tolerance) {
    Check<SubmodularityWitness> check;
    const int levels = values.num_energy_levels();
    for (int h = 1; h <= values.num_channels(); ++h) {
        for (int x = 0; x < levels; ++x) {
            for (int y = x; y < levels; ++y) {
                for (int d = 0; 2 * d <= y - x; ++d) {
                    double outer = values.at(x, h) + values.at(y, h);
                    double inner = values.at(x + d, h) + values.at(y - d, h);
                    if (outer > inner + tolerance) {
                        check.pass = false;
                        check.witness =
                            SubmodularityWitness{x, x + d, y - d, y, h, outer, inner};
                        return check;
                    }
                }
            }
        }
    }
    return check;
}

// Policy non-decreasing in both coordinates; exact integer comparison.
inline MonotonePolicyCheck check_monotone_policy(const PolicyTable& policy) {
    MonotonePolicyCheck check;
    for (int e = 0; e < policy.num_energy_levels() && check.channel.pass; ++e) {
        for (int h = 1; h + 1 <= policy.num_channels(); ++h) {
            int lo = policy.at(e, h);
            int hi = policy.at(e, h + 1);
            if (hi < lo) {
                check.channel.pass = false;
                check.channel.witness = MonotonePolicyWitness{{e, h}, {e, h + 1}, lo, hi};
                break;
            }
        }
    }
    for (int h = 1; h <= policy.num_channels() && check.energy.pass; ++h) {
        for (int e = 0; e + 1 < policy.num_energy_levels(); ++e) {
            int lo = policy.at(e, h);
            int hi = policy.at(e + 1, h);
            if (hi < lo) {
                check.energy.pass = false;
                check.energy.witness = MonotonePolicyWitness{{e, h}, {e + 1, h}, lo, hi};
                break;
            }
        }
    }
    return check;
}

// States whose best and second-best action values sit within `threshold` of
// each other. Convergence error can flip the argmax there, so policy-level
// conclusions at those states deserve suspicion.
inline std::vector<State> near_tie_states(const ProblemSpec& spec, const ValueTable& values,
                                          double threshold) {
    StateGrid<double> gaps = action_value_gaps(spec, values);
    std::vector<State> flagged;
    for (int e = 0; e < gaps.num_energy_levels(); ++e)
        for (int h = 1; h <= gaps.num_channels(); ++h)
            if (gaps.at(e, h) <= threshold) flagged.push_back(State{e, h});
    return flagged;
}

// Full verification bundle for one solved instance.
struct StructureReport {
    Check<MonotoneValueWitness> value_monotone_channel;
    Check<MonotoneValueWitness> value_monotone_energy;
    Check<ConcavityWitness> value_concave;
    Check<SubmodularityWitness> value_submodular;
    Check<MonotonePolicyWitness> policy_monotone_channel;
    Check<MonotonePolicyWitness> policy_monotone_energy;
    double tolerance_used = 0.0;
    double near_tie_threshold = 0.0;
    std::vector<State> near_ties;
    // Same instance re-solved with the largest-maximizer tie rule; reported
    // for comparison, never asserted.
    bool largest_tie_break_policy_monotone = true;

    bool all_pass() const {
        return value_monotone_channel.pass && value_monotone_energy.pass && value_concave.pass &&
               value_submodular.pass && policy_monotone_channel.pass &&
               policy_monotone_energy.pass;
    }

    bool is_near_tie(const State& s) const {
        for (const State& t : near_ties)
            if (t == s) return true;
        return false;
    }
};

// Value checks run at 100x the solver's guaranteed error bound so that
// convergence noise cannot produce spurious violations; policy checks are
// exact.
inline double structure_tolerance_for(const SolveDiagnostics& diagnostics) {
    return 100.0 * diagnostics.error_bound;
}

inline StructureReport run_structure_checks(const ProblemSpec& spec, const SolveResult& solved,
                                            double tolerance = -1.0) {
    StructureReport report;
    report.tolerance_used =
        tolerance >= 0.0 ? tolerance : structure_tolerance_for(solved.diagnostics);
    report.near_tie_threshold = solved.diagnostics.error_bound;

    MonotoneValueCheck monotone = check_monotone_value(solved.values, report.tolerance_used);
    report.value_monotone_channel = monotone.channel;
    report.value_monotone_energy = monotone.energy;
    report.value_concave = check_concave_value(solved.values, report.tolerance_used);
    report.value_submodular = check_submodularity(solved.values, report.tolerance_used);

    MonotonePolicyCheck policy = check_monotone_policy(solved.policy);
    report.policy_monotone_channel = policy.channel;
    report.policy_monotone_energy = policy.energy;

    report.near_ties = near_tie_states(spec, solved.values, report.near_tie_threshold);

    BackupResult alt = bellman_backup(spec, solved.values, TieBreak::largest);
    report.largest_tie_break_policy_monotone = check_monotone_policy(alt.policy).pass();
    return report;
}

inline std::string to_text(const StructureReport& report) {
    std::ostringstream out;
    out.precision(12);
    auto line = [&out](const char* name, bool pass, const std::string& detail) {
        out << name << ": " << (pass ? "pass" : "FAIL") << (pass ? "" : " -- " + detail)
            << "\n";
    };
    out << "structure checks (value tolerance " << report.tolerance_used << ")\n";
    line("value monotone in channel", report.value_monotone_channel.pass,
         report.value_monotone_channel.describe());
    line("value monotone in energy", report.value_monotone_energy.pass,
         report.value_monotone_energy.describe());
    line("value concave in energy", report.value_concave.pass, report.value_concave.describe());
    line("value submodular in energy", report.value_submodular.pass,
         report.value_submodular.describe());
    line("policy monotone in channel", report.policy_monotone_channel.pass,
         report.policy_monotone_channel.describe());
    line("policy monotone in energy", report.policy_monotone_energy.pass,
         report.policy_monotone_energy.describe());
    out << "largest-maximizer policy monotone (reported only): "
        << (report.largest_tie_break_policy_monotone ? "yes" : "no") << "\n";
    out << "near-tie states (action-value gap <= " << report.near_tie_threshold
        << "): " << report.near_ties.size() << "\n";
    for (const State& s : report.near_ties)
        out << "  near tie at (energy=" << s.energy << ", channel_index=" << s.channel_index
            << ")\n";
    out << "overall: " << (report.all_pass() ? "pass" : "FAIL") << "\n";
    return out.str();
}

} // namespace powalloc
