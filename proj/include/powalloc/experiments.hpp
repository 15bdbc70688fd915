// Batch commands over a loaded configuration: solve, verify, figures,
// simulate, sweep. Each command computes everything in memory first and then
// writes its output files in a fixed order, so a re-run with the same config
// and seed produces byte-identical files. Timing and other non-reproducible
// notes go to the log stream only, never into files.
#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "powalloc/config.hpp"
#include "powalloc/csv.hpp"
#include "powalloc/named_pmf.hpp"
#include "powalloc/sim.hpp"
#include "powalloc/solver.hpp"
#include "powalloc/structure.hpp"
#include "powalloc/structure_sweep.hpp"

namespace powalloc {

// Process exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNotConverged = 3;

namespace detail {

inline std::filesystem::path ensure_output_dir(const std::string& dir) {
    std::filesystem::path path(dir);
    std::filesystem::create_directories(path);
    return path;
}

inline std::string diagnostics_text(const SolverConfig& solver,
                                    const SolveDiagnostics& diagnostics) {
    std::ostringstream out;
    out.precision(12);
    out << "solver: value iteration from the zero table\n"
        << "reward convention: natural logarithm\n"
        << "epsilon: " << solver.epsilon << "\n"
        << "max_iterations: " << solver.max_iterations << "\n"
        << "iterations: " << diagnostics.iterations << "\n"
        << "final_sup_norm_delta: " << diagnostics.final_sup_norm_delta << "\n"
        << "error_bound: " << diagnostics.error_bound << "\n"
        << "converged: " << (diagnostics.converged ? "yes" : "NO (result is partial)") << "\n";
    return out.str();
}

inline void log_solve(std::ostream& log, const char* label, const SolveDiagnostics& d) {
    log << label << ": " << d.iterations << " iterations, error bound " << d.error_bound
        << ", " << d.wall_time_seconds << " s"
        << (d.converged ? "" : " [NOT CONVERGED]") << "\n";
}

inline void print_warnings(std::ostream& log, const ProblemSpec& spec) {
    for (const std::string& w : spec.warnings()) log << "warning: " << w << "\n";
}

} // namespace detail

inline int run_solve(const ExperimentConfig& config, std::ostream& log) {
    detail::print_warnings(log, config.problem);
    SolveResult solved = value_iteration(config.problem, config.solver.epsilon,
                                         config.solver.max_iterations);
    detail::log_solve(log, "solve", solved.diagnostics);

    const std::filesystem::path dir = detail::ensure_output_dir(config.output_dir);
    {
        std::ostringstream csv;
        write_value_table_csv(csv, config.problem, solved.values);
        write_text_file((dir / "value_table.csv").string(), csv.str());
    }
    {
        std::ostringstream csv;
        write_policy_table_csv(csv, config.problem, solved.policy);
        write_text_file((dir / "policy_table.csv").string(), csv.str());
    }
    write_text_file((dir / "diagnostics.txt").string(),
                    detail::diagnostics_text(config.solver, solved.diagnostics));
    log << "wrote " << (dir / "value_table.csv").string() << ", "
        << (dir / "policy_table.csv").string() << ", " << (dir / "diagnostics.txt").string()
        << "\n";
    return solved.diagnostics.converged ? kExitOk : kExitNotConverged;
}

// Self-test mode feeds the checks a deliberately broken solution (convex
// value table, alternating policy) to prove the failure path works end to
// end; it must exit with the check-failure code.
inline int run_verify_self_test(const ExperimentConfig& config, std::ostream& log) {
    SolveResult broken{make_value_table(config.problem), make_policy_table(config.problem), {}};
    for (int e = 0; e < config.problem.num_energy_levels(); ++e)
        for (int h = 1; h <= config.problem.num_channels(); ++h) {
            broken.values.at(e, h) = static_cast<double>(e) * e;
            broken.policy.at(e, h) = e % 2;
        }
    broken.diagnostics.converged = true;
    StructureReport report = run_structure_checks(config.problem, broken, 1e-9);

    const std::filesystem::path dir = detail::ensure_output_dir(config.output_dir);
    std::string text = "self-test against a deliberately broken solution\n" + to_text(report);
    write_text_file((dir / "structure_selftest_report.txt").string(), text);
    log << text;
    return report.all_pass() ? kExitOk : kExitCheckFailure;
}

inline int run_verify(const ExperimentConfig& config, std::ostream& log) {
    detail::print_warnings(log, config.problem);
    SolveResult solved = value_iteration(config.problem, config.solver.epsilon,
                                         config.solver.max_iterations);
    detail::log_solve(log, "solve", solved.diagnostics);

    const std::filesystem::path dir = detail::ensure_output_dir(config.output_dir);
    if (!solved.diagnostics.converged) {
        write_text_file((dir / "structure_report.txt").string(),
                        "solver did not converge; no checks were run\n" +
                            detail::diagnostics_text(config.solver, solved.diagnostics));
        return kExitNotConverged;
    }

    StructureReport report = run_structure_checks(config.problem, solved);
    write_text_file((dir / "structure_report.txt").string(), to_text(report));
    log << to_text(report);
    log << "wrote " << (dir / "structure_report.txt").string() << "\n";
    return report.all_pass() ? kExitOk : kExitCheckFailure;
}

inline int run_figures(const ExperimentConfig& config, std::ostream& log) {
    detail::print_warnings(log, config.problem);
    SolveResult base = value_iteration(config.problem, config.solver.epsilon,
                                       config.solver.max_iterations);
    detail::log_solve(log, "base solve", base.diagnostics);
    bool converged = base.diagnostics.converged;

    auto policy_series = [](const SolveResult& solved, int channel, std::string label) {
        FigureSeries series{std::move(label), {}};
        series.values.reserve(static_cast<std::size_t>(solved.policy.num_energy_levels()));
        for (int e = 0; e < solved.policy.num_energy_levels(); ++e)
            series.values.push_back(static_cast<double>(solved.policy.at(e, channel)));
        return series;
    };
    auto value_series = [](const SolveResult& solved, int channel, std::string label) {
        FigureSeries series{std::move(label), {}};
        series.values.reserve(static_cast<std::size_t>(solved.values.num_energy_levels()));
        for (int e = 0; e < solved.values.num_energy_levels(); ++e)
            series.values.push_back(solved.values.at(e, channel));
        return series;
    };

    std::vector<FigureSeries> policy_by_channel;
    for (int h : config.figures.policy_channels)
        policy_by_channel.push_back(policy_series(base, h, "h=" + std::to_string(h)));

    std::vector<FigureSeries> value_by_channel;
    for (int h : config.figures.value_channels)
        value_by_channel.push_back(value_series(base, h, "h=" + std::to_string(h)));

    std::vector<FigureSeries> policy_by_recharge;
    for (const std::string& name : config.sweep_axes.recharge_pmfs) {
        ProblemSpec variant = config.problem;
        variant.recharge_pmf = build_named_pmf(name, config.problem.recharge_pmf.size());
        SolveResult solved =
            value_iteration(variant, config.solver.epsilon, config.solver.max_iterations);
        detail::log_solve(log, ("recharge=" + name).c_str(), solved.diagnostics);
        converged = converged && solved.diagnostics.converged;
        policy_by_recharge.push_back(
            policy_series(solved, config.figures.recharge_compare_channel, name));
    }

    std::vector<FigureSeries> policy_by_discount;
    for (double lambda : config.sweep_axes.discounts) {
        ProblemSpec variant = config.problem;
        variant.discount = lambda;
        SolveResult solved =
            value_iteration(variant, config.solver.epsilon, config.solver.max_iterations);
        detail::log_solve(log, ("lambda=" + format_real(lambda)).c_str(), solved.diagnostics);
        converged = converged && solved.diagnostics.converged;
        policy_by_discount.push_back(policy_series(
            solved, config.figures.discount_compare_channel, "lambda=" + format_real(lambda)));
    }

    const std::filesystem::path dir = detail::ensure_output_dir(config.output_dir);
    auto write_figure = [&](const char* filename, const std::vector<FigureSeries>& series) {
        std::ostringstream csv;
        write_figure_csv(csv, series);
        write_text_file((dir / filename).string(), csv.str());
        log << "wrote " << (dir / filename).string() << "\n";
    };
    write_figure("policy_by_channel.csv", policy_by_channel);
    write_figure("value_by_channel.csv", value_by_channel);
    write_figure("policy_by_recharge.csv", policy_by_recharge);
    write_figure("policy_by_discount.csv", policy_by_discount);
    return converged ? kExitOk : kExitNotConverged;
}

struct PolicySource {
    enum class Kind { optimal, spend_all, zero, fixed_fraction, csv_file } kind = Kind::optimal;
    double fraction = 0.0;
    std::string csv_path;
};

// "optimal", "spend-all", "zero", "fixed-fraction:<q>" or a policy CSV path
// (optionally prefixed "csv:").
inline PolicySource parse_policy_source(const std::string& text) {
    PolicySource source;
    if (text == "optimal") {
        source.kind = PolicySource::Kind::optimal;
    } else if (text == "spend-all") {
        source.kind = PolicySource::Kind::spend_all;
    } else if (text == "zero") {
        source.kind = PolicySource::Kind::zero;
    } else if (text.rfind("fixed-fraction:", 0) == 0) {
        source.kind = PolicySource::Kind::fixed_fraction;
        try {
            source.fraction = std::stod(text.substr(15));
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse fraction in policy source '" + text + "'");
        }
        if (!(source.fraction >= 0.0) || !(source.fraction <= 1.0))
            throw std::invalid_argument("policy fraction must lie in [0, 1]");
    } else if (text.rfind("csv:", 0) == 0) {
        source.kind = PolicySource::Kind::csv_file;
        source.csv_path = text.substr(4);
    } else {
        source.kind = PolicySource::Kind::csv_file;
        source.csv_path = text;
    }
    return source;
}

inline int run_simulate(const ExperimentConfig& config, const PolicySource& source,
                        std::ostream& log) {
    detail::print_warnings(log, config.problem);

    TraceConfig trace;
    trace.n_traces = config.sim.traces;
    trace.seed = config.sim.seed;
    trace.start = config.sim.start_set
                      ? config.sim.start
                      : State{config.problem.battery_capacity, config.problem.num_channels()};
    trace.horizon = config.sim.horizon > 0
                        ? config.sim.horizon
                        : horizon_for_bias_bound(config.problem, config.sim.bias_bound);

    PolicyTable policy = make_policy_table(config.problem);
    std::optional<SolveResult> solved;
    std::string source_label;
    switch (source.kind) {
        case PolicySource::Kind::optimal: {
            solved = value_iteration(config.problem, config.solver.epsilon,
                                     config.solver.max_iterations);
            detail::log_solve(log, "solve", solved->diagnostics);
            if (!solved->diagnostics.converged) return kExitNotConverged;
            policy = solved->policy;
            source_label = "optimal";
            break;
        }
        case PolicySource::Kind::spend_all:
            policy = spend_all_policy(config.problem);
            source_label = "spend-all";
            break;
        case PolicySource::Kind::zero:
            policy = zero_policy(config.problem);
            source_label = "zero";
            break;
        case PolicySource::Kind::fixed_fraction:
            policy = fixed_fraction_policy(config.problem, source.fraction);
            source_label = "fixed-fraction:" + format_real(source.fraction);
            break;
        case PolicySource::Kind::csv_file: {
            std::ifstream in(source.csv_path);
            if (!in)
                throw std::invalid_argument("cannot open policy CSV '" + source.csv_path + "'");
            policy = read_policy_table_csv(in, config.problem);
            source_label = "csv:" + source.csv_path;
            break;
        }
    }

    SimReport report = simulate_policy(config.problem, policy, trace);

    std::ostringstream text;
    text.precision(12);
    text << "policy: " << source_label << "\n"
         << "start: energy=" << trace.start.energy
         << " channel_index=" << trace.start.channel_index << "\n"
         << to_text(report);
    if (source.kind == PolicySource::Kind::optimal) {
        double optimal_value = solved->values.at(trace.start.energy, trace.start.channel_index);
        double gap = std::abs(report.estimate - optimal_value);
        double threshold = 3.0 * report.std_error + report.truncation_bias_bound;
        text << "optimal_value_at_start: " << format_real(optimal_value) << "\n"
             << "gap: " << format_real(gap) << "\n"
             << "gap_threshold_3se_plus_bias: " << format_real(threshold) << "\n";
    }

    const std::filesystem::path dir = detail::ensure_output_dir(config.output_dir);
    write_text_file((dir / "sim_report.txt").string(), text.str());
    log << text.str();
    log << "wrote " << (dir / "sim_report.txt").string() << "\n";
    return kExitOk;
}

inline int run_random_sweep(const ExperimentConfig& config, std::ostream& log) {
    SweepConfig sweep;
    sweep.seed = config.random_sweep.seed;
    sweep.instances = config.random_sweep.instances;
    sweep.bounds = config.random_sweep.bounds;
    sweep.solver_epsilon = config.solver.epsilon;
    sweep.solver_max_iterations = config.solver.max_iterations;

    SweepReport report = randomized_structure_sweep(sweep);

    const std::filesystem::path dir = detail::ensure_output_dir(config.output_dir);
    write_text_file((dir / "sweep_report.txt").string(), to_text(report));
    log << to_text(report);
    log << "wrote " << (dir / "sweep_report.txt").string() << "\n";
    if (!report.errors.empty()) return kExitNotConverged;
    return report.all_pass() ? kExitOk : kExitCheckFailure;
}

} // namespace powalloc
