// Randomized verification experiment: solve many random instances and run
// every structure check on each. The structural guarantees hold for
// arbitrary recharge and channel distributions, so a single failure anywhere
// is a finding.
#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "powalloc/random_instance.hpp"
#include "powalloc/rng.hpp"
#include "powalloc/solver.hpp"
#include "powalloc/structure.hpp"

namespace powalloc {

struct SweepFailure {
    int instance_index = 0;
    std::string check_name;
    std::string witness;
};

struct SweepError {
    int instance_index = 0;
    std::string message;
};

struct SweepReport {
    int instances_requested = 0;
    int instances_solved = 0;
    std::vector<SweepFailure> failures;
    std::vector<SweepError> errors;  // e.g. solver non-convergence
    int near_tie_state_total = 0;
    int largest_tie_break_monotone_count = 0;  // reported, not asserted
    double max_tolerance_used = 0.0;

    bool all_pass() const { return failures.empty() && errors.empty(); }
};

struct SweepConfig {
    std::uint64_t seed = 42;
    int instances = 200;
    InstanceBounds bounds;
    double solver_epsilon = 1e-9;
    int solver_max_iterations = 500000;
};

inline SweepReport randomized_structure_sweep(const SweepConfig& config) {
    if (config.instances < 0) throw std::invalid_argument("instances must be non-negative");

    SweepReport report;
    report.instances_requested = config.instances;

    for (int i = 0; i < config.instances; ++i) {
        // per-instance sub-stream: instance i is stable under changes to the count
        Rng rng(substream_seed(config.seed, static_cast<std::uint64_t>(i)));
        ProblemSpec spec = random_problem_spec(rng, config.bounds);

        SolveResult solved =
            value_iteration(spec, config.solver_epsilon, config.solver_max_iterations);
        if (!solved.diagnostics.converged) {
            std::ostringstream msg;
            msg << "value iteration did not converge within " << config.solver_max_iterations
                << " iterations (final delta " << solved.diagnostics.final_sup_norm_delta << ")";
            report.errors.push_back(SweepError{i, msg.str()});
            continue;
        }
        ++report.instances_solved;

        StructureReport checks = run_structure_checks(spec, solved);
        report.max_tolerance_used = std::max(report.max_tolerance_used, checks.tolerance_used);
        report.near_tie_state_total += static_cast<int>(checks.near_ties.size());
        if (checks.largest_tie_break_policy_monotone) ++report.largest_tie_break_monotone_count;

        auto record = [&](const char* name, bool pass, const std::string& witness) {
            if (!pass) report.failures.push_back(SweepFailure{i, name, witness});
        };
        record("value monotone in channel", checks.value_monotone_channel.pass,
               checks.value_monotone_channel.describe());
        record("value monotone in energy", checks.value_monotone_energy.pass,
               checks.value_monotone_energy.describe());
        record("value concave in energy", checks.value_concave.pass,
               checks.value_concave.describe());
        record("value submodular in energy", checks.value_submodular.pass,
               checks.value_submodular.describe());
        record("policy monotone in channel", checks.policy_monotone_channel.pass,
               checks.policy_monotone_channel.describe());
        record("policy monotone in energy", checks.policy_monotone_energy.pass,
               checks.policy_monotone_energy.describe());
    }
    return report;
}

inline std::string to_text(const SweepReport& report) {
    std::ostringstream out;
    out.precision(12);
    out << "randomized structure sweep: " << report.instances_solved << "/"
        << report.instances_requested << " instances solved\n";
    out << "max value tolerance used: " << report.max_tolerance_used << "\n";
    out << "near-tie states flagged across instances: " << report.near_tie_state_total << "\n";
    out << "largest-maximizer policy monotone (reported only): "
        << report.largest_tie_break_monotone_count << "/" << report.instances_solved << "\n";
    for (const SweepError& e : report.errors)
        out << "error at instance " << e.instance_index << ": " << e.message << "\n";
    for (const SweepFailure& f : report.failures)
        out << "FAIL at instance " << f.instance_index << " [" << f.check_name
            << "]: " << f.witness << "\n";
    out << "overall: " << (report.all_pass() ? "pass" : "FAIL") << "\n";
    return out.str();
}

} // namespace powalloc
